#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "anxmap/classifier.hpp"
#include "anxmap/evaluation.hpp"
#include "anxmap/geostore.hpp"

// Structured-text renderings shared by the CLI and the HTTP service. Field
// order is fixed so identical inputs produce identical bytes.
namespace anxmap::json_io {

using json = nlohmann::ordered_json;

// Finite values as numbers; infinities as "Infinity" / "-Infinity".
json real(double v);

json tokens(const TokenSequence& seq);
json config(const DecisionConfig& config);
json classification(const ClassificationResult& result);
json eval_report(const EvalReport& report);
json sweep(std::span<const SweepPoint> points, const SelectedThreshold& selected);
json regions(const std::vector<RegionAggregate>& aggregates);
json message(const Message& m);
json message_page(const MessagePage& page);
json word_cloud(const std::vector<TermCount>& terms);
json meta(const StoreMeta& meta, const GridConfig& grid, const DecisionConfig& model_config);
json ingest_report(const IngestReport& report);

// threshold, recall_anx, recall_non, accuracy, product; tab-separated with header.
std::string sweep_table(std::span<const SweepPoint> points);
std::string report_table(const EvalReport& report);

}  // namespace anxmap::json_io
