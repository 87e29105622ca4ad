#include "anxmap/geostore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

constexpr std::size_t kMaxReportedErrors = 20;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool matches(const Message& m, const std::vector<WordQuery>& filter) {
  return std::all_of(filter.begin(), filter.end(), [&](const WordQuery& q) {
    return std::any_of(m.tokens.begin(), m.tokens.end(), [&](const Token& t) {
      return t.surface == q.surface && (!q.pos || t.pos == *q.pos);
    });
  });
}

}  // namespace

std::string_view to_string(Zoom z) { return z == Zoom::Province ? "province" : "county"; }

Zoom parse_zoom(std::string_view name) {
  if (name == "province") return Zoom::Province;
  if (name == "county") return Zoom::County;
  throw Error(ErrorCode::BadZoom, "zoom must be province or county, got '" + std::string(name) + "'");
}

std::string GridCell::id() const {
  return std::string(to_string(zoom)) + ":" + std::to_string(row) + ":" + std::to_string(col);
}

std::int64_t to_microdegrees(double degrees) { return std::llround(degrees * 1e6); }

GridCell cell_of(double lat, double lon, Zoom zoom, const GridConfig& grid) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0 || lon < -180.0 ||
      lon > 180.0) {
    throw Error(ErrorCode::BadCoordinates, "coordinates out of range");
  }
  const std::int64_t size = to_microdegrees(grid.size(zoom));
  if (size <= 0) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
  return {zoom, floor_div(to_microdegrees(lat), size), floor_div(to_microdegrees(lon), size)};
}

std::vector<WordQuery> parse_word_query(std::string_view q) {
  std::vector<WordQuery> out;
  for (const auto& tok : fallback_tokenize(q)) {
    WordQuery w{tok.surface, std::nullopt};
    try {
      auto parsed = parse_tagged_text(tok.surface);
      if (parsed.size() == 1) w = {parsed[0].surface, parsed[0].pos};
    } catch (const Error&) {
      // not surface/POS; match the surface as written
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::uint64_t IngestReport::rejected_total() const {
  std::uint64_t n = 0;
  for (const auto& [_, count] : rejected) n += count;
  return n;
}

// --- Snapshot -------------------------------------------------------------

std::pair<std::size_t, std::size_t> Snapshot::TimeIndex::span(const TimeRange& range) const {
  const auto from = range.from.time_since_epoch().count();
  const auto to = range.to.time_since_epoch().count();
  const auto lo = std::lower_bound(ts.begin(), ts.end(), from) - ts.begin();
  const auto hi = std::lower_bound(ts.begin(), ts.end(), to) - ts.begin();
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
}

Snapshot::Snapshot(std::vector<Message> messages, GridConfig grid)
    : messages_(std::move(messages)), grid_(grid) {
  ids_.reserve(messages_.size());
  for (std::uint32_t i = 0; i < messages_.size(); ++i) {
    const auto& r = messages_[i].record;
    ids_.insert(r.id);
    all_.order.push_back(i);
    for (Zoom z : {Zoom::Province, Zoom::County}) {
      const auto cell = cell_of(r.lat, r.lon, z, grid_);
      auto& cells = z == Zoom::Province ? province_ : county_;
      cells[{cell.row, cell.col}].order.push_back(i);
    }
  }
  build_index(all_);
  for (auto& [_, index] : province_) build_index(index);
  for (auto& [_, index] : county_) build_index(index);
}

void Snapshot::build_index(TimeIndex& index) const {
  std::sort(index.order.begin(), index.order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& ra = messages_[a].record;
    const auto& rb = messages_[b].record;
    if (ra.ts != rb.ts) return ra.ts < rb.ts;
    return ra.id < rb.id;
  });
  index.ts.reserve(index.order.size());
  index.anxious_prefix.assign(1, 0);
  index.anxious_prefix.reserve(index.order.size() + 1);
  for (auto i : index.order) {
    index.ts.push_back(messages_[i].record.ts.time_since_epoch().count());
    index.anxious_prefix.push_back(index.anxious_prefix.back() + (messages_[i].anxious() ? 1 : 0));
  }
}

const Snapshot::TimeIndex* Snapshot::find_cell(const GridCell& cell) const {
  const auto& cells = cell.zoom == Zoom::Province ? province_ : county_;
  auto it = cells.find({cell.row, cell.col});
  return it == cells.end() ? nullptr : &it->second;
}

bool Snapshot::contains_id(std::string_view id) const { return ids_.contains(std::string(id)); }

StoreMeta Snapshot::meta() const {
  StoreMeta m;
  m.record_count = messages_.size();
  if (!all_.ts.empty()) {
    m.time_min = Instant{std::chrono::seconds{all_.ts.front()}};
    m.time_max = Instant{std::chrono::seconds{all_.ts.back()}};
    m.global_ratio = static_cast<double>(all_.anxious_prefix.back()) /
                     static_cast<double>(messages_.size());
  }
  return m;
}

std::optional<TimeRange> Snapshot::full_range() const {
  if (all_.ts.empty()) return std::nullopt;
  return TimeRange{Instant{std::chrono::seconds{all_.ts.front()}},
                   Instant{std::chrono::seconds{all_.ts.back() + 1}}};
}

std::vector<RegionAggregate> Snapshot::aggregate(const TimeRange& range, Zoom zoom) const {
  std::vector<RegionAggregate> out;
  const auto [glo, ghi] = all_.span(range);
  if (glo == ghi) return out;
  const double global_ratio =
      static_cast<double>(all_.anxious_prefix[ghi] - all_.anxious_prefix[glo]) /
      static_cast<double>(ghi - glo);

  const auto& cells = zoom == Zoom::Province ? province_ : county_;
  for (const auto& [key, index] : cells) {
    const auto [lo, hi] = index.span(range);
    if (lo == hi) continue;
    RegionAggregate agg;
    agg.cell = {zoom, key.row, key.col};
    agg.total = hi - lo;
    agg.anxious = index.anxious_prefix[hi] - index.anxious_prefix[lo];
    agg.ratio = static_cast<double>(agg.anxious) / static_cast<double>(agg.total);
    agg.intensity = std::clamp(agg.ratio - global_ratio, -1.0, 1.0);
    out.push_back(agg);
  }
  return out;
}

MessagePage Snapshot::region_messages(const GridCell& cell, const TimeRange& range,
                                      const std::vector<WordQuery>& filter, std::int64_t offset,
                                      std::int64_t limit) const {
  if (offset < 0 || limit < 0) throw Error(ErrorCode::BadPage, "offset and limit must be non-negative");
  MessagePage page;
  page.region = cell.id();
  page.offset = offset;
  page.limit = limit;
  const TimeIndex* index = find_cell(cell);
  if (index == nullptr) return page;

  std::vector<std::uint32_t> hits;
  const auto [lo, hi] = index->span(range);
  for (auto i = lo; i < hi; ++i) {
    const auto m = index->order[i];
    if (matches(messages_[m], filter)) hits.push_back(m);
  }
  std::sort(hits.begin(), hits.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto& ra = messages_[a].record;
    const auto& rb = messages_[b].record;
    if (ra.ts != rb.ts) return ra.ts > rb.ts;
    return ra.id < rb.id;
  });
  page.total = hits.size();
  const auto begin = std::min<std::uint64_t>(static_cast<std::uint64_t>(offset), hits.size());
  const auto end = std::min<std::uint64_t>(begin + static_cast<std::uint64_t>(limit), hits.size());
  for (auto i = begin; i < end; ++i) page.messages.push_back(messages_[hits[i]]);
  return page;
}

std::vector<TermCount> Snapshot::word_cloud(const std::optional<GridCell>& cell,
                                            const TimeRange& range, std::int64_t k) const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const TimeIndex* index = cell ? find_cell(*cell) : &all_;
  if (index == nullptr) return {};

  std::map<std::string, std::uint64_t> counts;
  const auto [lo, hi] = index->span(range);
  for (auto i = lo; i < hi; ++i) {
    for (const auto& tok : messages_[index->order[i]].tokens) ++counts[tok.surface];
  }
  std::vector<TermCount> terms;
  terms.reserve(counts.size());
  for (auto& [surface, count] : counts) terms.push_back({surface, count});
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), terms.size());
  std::partial_sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(keep), terms.end(),
                    [](const TermCount& a, const TermCount& b) {
                      if (a.count != b.count) return a.count > b.count;
                      return a.surface < b.surface;
                    });
  terms.resize(keep);
  return terms;
}

// --- Store ----------------------------------------------------------------

Store::Store(std::shared_ptr<const ClassifierModel> model, GridConfig grid)
    : model_(std::move(model)), grid_(grid) {}

std::unique_ptr<Store> Store::open(const std::filesystem::path& dir,
                                   std::shared_ptr<const ClassifierModel> model, GridConfig grid) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::UnreadableSource, "cannot open store directory " + dir.string());
  }
  auto store = std::make_unique<Store>(std::move(model), grid);
  const auto log = dir / kLogName;
  Pending batch;
  if (std::filesystem::exists(log)) {
    std::ifstream in(log);
    if (!in) throw Error(ErrorCode::UnreadableSource, "cannot read " + log.string());
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        store->accept(batch, parse_corpus_line(line), seen);
      } catch (const Error& e) {
        store->reject(batch, lineno, std::string(to_string(e.code())), e.what());
      }
    }
  }
  store->publish(std::move(batch), false);
  store->log_path_ = log;
  return store;
}

std::shared_ptr<const Snapshot> Store::snapshot() const {
  std::shared_lock lock(mutex_);
  return current_;
}

void Store::accept(Pending& batch, CorpusRecord record, std::unordered_set<std::string>& seen) const {
  const auto& snap = current_;
  if ((snap && snap->contains_id(record.id)) || !seen.insert(record.id).second) {
    throw Error(ErrorCode::DuplicateId, "duplicate id '" + record.id + "'");
  }
  // validates the coordinates against the grid as well
  (void)cell_of(record.lat, record.lon, Zoom::County, grid_);
  Message m;
  m.tokens = filter_significant(record.tokens, model_->config().pos_filter);
  m.predicted = classify(*model_, m.tokens);
  m.record = std::move(record);
  batch.added.push_back(std::move(m));
  ++batch.report.accepted;
}

void Store::reject(Pending& batch, std::size_t line, const std::string& code,
                   const std::string& what) const {
  ++batch.report.rejected[code];
  if (batch.report.first_errors.size() < kMaxReportedErrors) {
    batch.report.first_errors.push_back({line, code, what});
  }
}

IngestReport Store::publish(Pending batch, bool persist) {
  if (persist && log_path_ && !batch.added.empty()) {
    std::ofstream out(*log_path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + log_path_->string());
    for (const auto& m : batch.added) out << serialize_corpus_line(m.record) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + log_path_->string());
  }
  std::vector<Message> messages;
  if (current_) messages = current_->messages();
  messages.reserve(messages.size() + batch.added.size());
  for (auto& m : batch.added) messages.push_back(std::move(m));
  auto next = std::make_shared<const Snapshot>(std::move(messages), grid_);
  {
    std::unique_lock lock(mutex_);
    current_ = std::move(next);
  }
  return std::move(batch.report);
}

IngestReport Store::ingest(std::istream& lines) {
  std::lock_guard writer(writer_);
  Pending batch;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      accept(batch, parse_corpus_line(line), seen);
    } catch (const Error& e) {
      reject(batch, lineno, std::string(to_string(e.code())), e.what());
    }
  }
  return publish(std::move(batch), true);
}

IngestReport Store::ingest(const std::vector<CorpusRecord>& records) {
  std::lock_guard writer(writer_);
  Pending batch;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      accept(batch, records[i], seen);
    } catch (const Error& e) {
      reject(batch, i + 1, std::string(to_string(e.code())), e.what());
    }
  }
  return publish(std::move(batch), true);
}

IngestReport Store::ingest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());
  return ingest(in);
}

}  // namespace anxmap
