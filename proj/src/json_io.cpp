#include "anxmap/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace anxmap::json_io {

json real(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (std::isnan(v)) return nullptr;
  return v;
}

json tokens(const TokenSequence& seq) {
  auto out = json::array();
  for (const auto& t : seq) out.push_back({t.surface, t.pos});
  return out;
}

json config(const DecisionConfig& config) {
  json j;
  j["smoothing"] = config.smoothing == Smoothing::On;
  j["threshold"] = config.threshold;
  j["pos_filter"] = config.pos_filter;
  return j;
}

json classification(const ClassificationResult& r) {
  json j;
  j["label"] = to_string(r.label);
  j["ratio"] = real(r.ratio);
  json ll;
  ll["NonAnxiety"] = real(r.log_lik[index_of(ClassLabel::NonAnxiety)]);
  ll["Anxiety"] = real(r.log_lik[index_of(ClassLabel::Anxiety)]);
  j["log_lik"] = std::move(ll);
  j["method"] = to_string(r.method);
  j["degenerate"] = r.degenerate;
  return j;
}

json eval_report(const EvalReport& r) {
  json j;
  j["confusion"] = {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}};
  j["confusion_axes"] = {"gold", "predicted", {"NonAnxiety", "Anxiety"}};
  j["recall_anxiety"] = r.recall_anxiety;
  j["recall_non_anxiety"] = r.recall_non_anxiety;
  j["accuracy"] = r.accuracy;
  j["product"] = r.product;
  j["recall_anxiety_vacuous"] = r.recall_anxiety_vacuous;
  j["recall_non_anxiety_vacuous"] = r.recall_non_anxiety_vacuous;
  return j;
}

json sweep(std::span<const SweepPoint> points, const SelectedThreshold& selected) {
  json j;
  auto arr = json::array();
  for (const auto& p : points) {
    json point;
    point["threshold"] = p.threshold;
    point["report"] = eval_report(p.report);
    arr.push_back(std::move(point));
  }
  j["points"] = std::move(arr);
  j["selected"] = {{"threshold", selected.threshold}, {"product", selected.product}};
  return j;
}

json regions(const std::vector<RegionAggregate>& aggregates) {
  auto out = json::array();
  for (const auto& a : aggregates) {
    json j;
    j["zoom"] = to_string(a.cell.zoom);
    j["row"] = a.cell.row;
    j["col"] = a.cell.col;
    j["total"] = a.total;
    j["anxious"] = a.anxious;
    j["ratio"] = a.ratio;
    j["intensity"] = a.intensity;
    out.push_back(std::move(j));
  }
  return out;
}

json message(const Message& m) {
  json j;
  j["id"] = m.record.id;
  j["text"] = m.record.text;
  j["tokens"] = tokens(m.tokens);
  if (m.record.label) {
    j["label"] = *m.record.label == ClassLabel::Anxiety ? 1 : 0;
  } else {
    j["label"] = nullptr;
  }
  j["lat"] = m.record.lat;
  j["lon"] = m.record.lon;
  j["ts"] = format_utc(m.record.ts);
  j["predicted"] = classification(m.predicted);
  return j;
}

json message_page(const MessagePage& page) {
  json j;
  j["region"] = page.region;
  j["total"] = page.total;
  j["offset"] = page.offset;
  j["limit"] = page.limit;
  auto msgs = json::array();
  for (const auto& m : page.messages) msgs.push_back(message(m));
  j["messages"] = std::move(msgs);
  return j;
}

json word_cloud(const std::vector<TermCount>& terms) {
  auto out = json::array();
  for (const auto& t : terms) out.push_back({{"surface", t.surface}, {"count", t.count}});
  return out;
}

json meta(const StoreMeta& meta, const GridConfig& grid, const DecisionConfig& model_config) {
  json j;
  j["time_min"] = meta.time_min ? json(format_utc(*meta.time_min)) : json(nullptr);
  j["time_max"] = meta.time_max ? json(format_utc(*meta.time_max)) : json(nullptr);
  j["record_count"] = meta.record_count;
  j["global_ratio"] = meta.global_ratio ? json(*meta.global_ratio) : json(nullptr);
  j["zooms"] = {{{"name", "province"}, {"size", grid.province_size}},
                {{"name", "county"}, {"size", grid.county_size}}};
  j["model_config"] = config(model_config);
  return j;
}

json ingest_report(const IngestReport& report) {
  json j;
  j["accepted"] = report.accepted;
  j["rejected_total"] = report.rejected_total();
  json by_code = json::object();
  for (const auto& [code, n] : report.rejected) by_code[code] = n;
  j["rejected"] = std::move(by_code);
  auto errs = json::array();
  for (const auto& e : report.first_errors) {
    errs.push_back({{"line", e.line}, {"code", e.code}, {"message", e.message}});
  }
  j["errors"] = std::move(errs);
  return j;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string sweep_table(std::span<const SweepPoint> points) {
  std::string out = "threshold\trecall_anx\trecall_non\taccuracy\tproduct\n";
  for (const auto& p : points) {
    char t[32];
    std::snprintf(t, sizeof t, "%g", p.threshold);
    out += std::string(t) + "\t" + fmt(p.report.recall_anxiety) + "\t" +
           fmt(p.report.recall_non_anxiety) + "\t" + fmt(p.report.accuracy) + "\t" +
           fmt(p.report.product) + "\n";
  }
  return out;
}

std::string report_table(const EvalReport& r) {
  std::string out;
  out += "recall_anx\trecall_non\taccuracy\tproduct\n";
  out += fmt(r.recall_anxiety) + "\t" + fmt(r.recall_non_anxiety) + "\t" + fmt(r.accuracy) + "\t" +
         fmt(r.product) + "\n";
  return out;
}

}  // namespace anxmap::json_io
