#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anxmap/classifier.hpp"

namespace anxmap {

// How a test item is labeled during evaluation.
struct EvalMethod {
  Method kind = Method::MlRatio;
  double threshold = 1.0;  // ignored for MAP

  static EvalMethod ml_ratio(double threshold) { return {Method::MlRatio, threshold}; }
  static EvalMethod map() { return {Method::Map, 1.0}; }
};

struct EvalReport {
  // confusion[gold][predicted], indexed by ClassLabel.
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};
  double recall_anxiety = 0.0;
  double recall_non_anxiety = 0.0;
  double accuracy = 0.0;
  double product = 0.0;
  // Set when the gold set has no items of that class; recall is then 1.0.
  bool recall_anxiety_vacuous = false;
  bool recall_non_anxiety_vacuous = false;

  std::uint64_t gold(ClassLabel c) const;
  std::uint64_t predicted(ClassLabel c) const;
  std::uint64_t total() const;
};

struct SweepPoint {
  double threshold;
  EvalReport report;
};

struct SelectedThreshold {
  double threshold;
  double product;
};

// Metrics from a filled-in confusion matrix.
EvalReport report_from_confusion(
    const std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>& confusion);

// Throws EmptyTestSet.
EvalReport evaluate(const ClassifierModel& model, std::span<const LabeledSequence> test,
                    EvalMethod method, Smoothing smoothing);

// One scoring pass; every threshold reuses the cached likelihoods.
// Thresholds must be non-empty, strictly ascending, and positive (BadSweepGrid).
std::vector<SweepPoint> sweep(const ClassifierModel& model, std::span<const LabeledSequence> test,
                              std::span<const double> thresholds, Smoothing smoothing);

// Maximal product; ties go to the smallest threshold. Throws EmptySweep.
SelectedThreshold select_threshold(std::span<const SweepPoint> points);

// first, first+step, ... up to last (inclusive, with rounding slack).
std::vector<double> threshold_grid(double first, double last, double step);
// Parses "first:last:step".
std::vector<double> parse_threshold_grid(const std::string& text);

}  // namespace anxmap
