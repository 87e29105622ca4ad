#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "anxmap/classifier.hpp"
#include "anxmap/corpus.hpp"
#include "anxmap/timeutil.hpp"

namespace anxmap {

enum class Zoom { Province, County };
std::string_view to_string(Zoom z);
// Throws BadZoom.
Zoom parse_zoom(std::string_view name);

// Cell edge lengths in degrees. County must divide province for the two
// zooms to nest.
struct GridConfig {
  double province_size = 1.0;
  double county_size = 0.2;

  double size(Zoom z) const { return z == Zoom::Province ? province_size : county_size; }
};

struct GridCell {
  Zoom zoom = Zoom::Province;
  std::int64_t row = 0;
  std::int64_t col = 0;

  std::string id() const;  // "province:37:126"
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Coordinates are quantized to whole microdegrees before the floor division so
// that cell assignment is exact. Throws BadCoordinates.
GridCell cell_of(double lat, double lon, Zoom zoom, const GridConfig& grid = {});
std::int64_t to_microdegrees(double degrees);

struct Message {
  CorpusRecord record;  // as ingested; record.tokens holds the unfiltered input
  TokenSequence tokens;  // after the model's POS filter
  ClassificationResult predicted;

  bool anxious() const { return predicted.label == ClassLabel::Anxiety; }
};

struct RegionAggregate {
  GridCell cell;
  std::uint64_t total = 0;
  std::uint64_t anxious = 0;
  double ratio = 0.0;
  // ratio minus the in-range global ratio, clamped to [-1, 1].
  double intensity = 0.0;
};

// A search word: a bare surface, or surface/POS to pin the tag as well.
struct WordQuery {
  std::string surface;
  std::optional<std::string> pos;
};
std::vector<WordQuery> parse_word_query(std::string_view q);

struct MessagePage {
  std::string region;
  std::uint64_t total = 0;  // matching messages before pagination
  std::int64_t offset = 0;
  std::int64_t limit = 0;
  std::vector<Message> messages;
};

struct TermCount {
  std::string surface;
  std::uint64_t count = 0;

  friend bool operator==(const TermCount&, const TermCount&) = default;
};

struct StoreMeta {
  std::optional<Instant> time_min;
  std::optional<Instant> time_max;
  std::uint64_t record_count = 0;
  std::optional<double> global_ratio;
};

struct IngestReport {
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> rejected;  // by error code
  struct Rejection {
    std::size_t line;
    std::string code;
    std::string message;
  };
  std::vector<Rejection> first_errors;  // capped

  std::uint64_t rejected_total() const;
};

// Immutable, indexed view over a set of messages. Every query is a pure
// function of the snapshot.
class Snapshot {
 public:
  Snapshot(std::vector<Message> messages, GridConfig grid);

  const std::vector<Message>& messages() const noexcept { return messages_; }
  const GridConfig& grid() const noexcept { return grid_; }
  bool contains_id(std::string_view id) const;

  StoreMeta meta() const;
  // Covers every message; nullopt on an empty snapshot.
  std::optional<TimeRange> full_range() const;

  std::vector<RegionAggregate> aggregate(const TimeRange& range, Zoom zoom) const;

  // Newest first (ties by id). Throws BadPage for negative offset or limit.
  MessagePage region_messages(const GridCell& cell, const TimeRange& range,
                              const std::vector<WordQuery>& filter, std::int64_t offset,
                              std::int64_t limit) const;

  // Top-k surfaces by token count, ties lexicographic. nullopt cell = all cells.
  // Throws InvalidArgument for k < 1.
  std::vector<TermCount> word_cloud(const std::optional<GridCell>& cell, const TimeRange& range,
                                    std::int64_t k) const;

 private:
  struct CellKey {
    std::int64_t row;
    std::int64_t col;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
  };
  // Message indices sorted by (ts, id) with a running anxious count.
  struct TimeIndex {
    std::vector<std::uint32_t> order;
    std::vector<std::int64_t> ts;
    std::vector<std::uint32_t> anxious_prefix;  // size order.size() + 1

    std::pair<std::size_t, std::size_t> span(const TimeRange& range) const;
  };

  void build_index(TimeIndex& index) const;
  const TimeIndex* find_cell(const GridCell& cell) const;

  std::vector<Message> messages_;
  GridConfig grid_;
  std::unordered_set<std::string> ids_;
  TimeIndex all_;
  std::map<CellKey, TimeIndex> province_;
  std::map<CellKey, TimeIndex> county_;
};

// Single writer, many readers. Each ingest batch builds a fresh Snapshot and
// publishes it; readers keep whatever snapshot they grabbed.
class Store {
 public:
  explicit Store(std::shared_ptr<const ClassifierModel> model, GridConfig grid = {});

  // Opens (creating if needed) a store directory and replays its log.
  static std::unique_ptr<Store> open(const std::filesystem::path& dir,
                                     std::shared_ptr<const ClassifierModel> model,
                                     GridConfig grid = {});

  // nullptr until the first publish.
  std::shared_ptr<const Snapshot> snapshot() const;

  // Per-record failures are counted and skipped. Accepted records are appended
  // to the log when the store is directory-backed.
  IngestReport ingest(std::istream& lines);
  IngestReport ingest(const std::vector<CorpusRecord>& records);
  IngestReport ingest_file(const std::filesystem::path& path);

  const ClassifierModel& model() const noexcept { return *model_; }
  static constexpr const char* kLogName = "records.ndjson";

 private:
  struct Pending {
    std::vector<Message> added;
    IngestReport report;
  };
  void accept(Pending& batch, CorpusRecord record, std::unordered_set<std::string>& seen) const;
  void reject(Pending& batch, std::size_t line, const std::string& code, const std::string& what) const;
  IngestReport publish(Pending batch, bool persist);

  std::shared_ptr<const ClassifierModel> model_;
  GridConfig grid_;
  std::optional<std::filesystem::path> log_path_;
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const Snapshot> current_;
  std::mutex writer_;
};

}  // namespace anxmap
