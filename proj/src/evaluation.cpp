#include "anxmap/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "anxmap/error.hpp"

namespace anxmap {

namespace {

constexpr auto kAnx = index_of(ClassLabel::Anxiety);
constexpr auto kNon = index_of(ClassLabel::NonAnxiety);

void require_non_empty(std::span<const LabeledSequence> test) {
  if (test.empty()) throw Error(ErrorCode::EmptyTestSet, "test set has no items");
}

}  // namespace

std::uint64_t EvalReport::gold(ClassLabel c) const {
  const auto& row = confusion[index_of(c)];
  return row[0] + row[1];
}

std::uint64_t EvalReport::predicted(ClassLabel c) const {
  return confusion[0][index_of(c)] + confusion[1][index_of(c)];
}

std::uint64_t EvalReport::total() const { return gold(ClassLabel::Anxiety) + gold(ClassLabel::NonAnxiety); }

EvalReport report_from_confusion(
    const std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>& confusion) {
  EvalReport r;
  r.confusion = confusion;
  const auto gold_anx = r.gold(ClassLabel::Anxiety);
  const auto gold_non = r.gold(ClassLabel::NonAnxiety);
  const auto total = gold_anx + gold_non;

  r.recall_anxiety_vacuous = gold_anx == 0;
  r.recall_non_anxiety_vacuous = gold_non == 0;
  r.recall_anxiety =
      gold_anx == 0 ? 1.0 : static_cast<double>(confusion[kAnx][kAnx]) / static_cast<double>(gold_anx);
  r.recall_non_anxiety =
      gold_non == 0 ? 1.0 : static_cast<double>(confusion[kNon][kNon]) / static_cast<double>(gold_non);
  r.accuracy = total == 0 ? 0.0
                          : static_cast<double>(confusion[kAnx][kAnx] + confusion[kNon][kNon]) /
                                static_cast<double>(total);
  r.product = r.recall_anxiety * r.accuracy;
  return r;
}

EvalReport evaluate(const ClassifierModel& model, std::span<const LabeledSequence> test,
                    EvalMethod method, Smoothing smoothing) {
  require_non_empty(test);
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};
  for (const auto& item : test) {
    const auto result = method.kind == Method::Map
                            ? classify_map(model, item.tokens, smoothing)
                            : classify_ratio(model, item.tokens, method.threshold, smoothing);
    ++confusion[index_of(item.label)][index_of(result.label)];
  }
  return report_from_confusion(confusion);
}

std::vector<SweepPoint> sweep(const ClassifierModel& model, std::span<const LabeledSequence> test,
                              std::span<const double> thresholds, Smoothing smoothing) {
  require_non_empty(test);
  if (thresholds.empty()) throw Error(ErrorCode::BadSweepGrid, "no thresholds");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0) || !std::isfinite(thresholds[i])) {
      throw Error(ErrorCode::BadSweepGrid, "thresholds must be positive", i);
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::BadSweepGrid, "thresholds must be strictly ascending", i);
    }
  }

  std::vector<ClassificationResult> scored;
  scored.reserve(test.size());
  for (const auto& item : test) scored.push_back(classify_ratio(model, item.tokens, 1.0, smoothing));

  std::vector<SweepPoint> points;
  points.reserve(thresholds.size());
  for (double t : thresholds) {
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};
    for (std::size_t i = 0; i < test.size(); ++i) {
      ++confusion[index_of(test[i].label)][index_of(label_at(scored[i], t))];
    }
    points.push_back({t, report_from_confusion(confusion)});
  }
  return points;
}

SelectedThreshold select_threshold(std::span<const SweepPoint> points) {
  if (points.empty()) throw Error(ErrorCode::EmptySweep, "no sweep points");
  const SweepPoint* best = &points.front();
  for (const auto& p : points) {
    if (p.report.product > best->report.product ||
        (p.report.product == best->report.product && p.threshold < best->threshold)) {
      best = &p;
    }
  }
  return {best->threshold, best->report.product};
}

std::vector<double> threshold_grid(double first, double last, double step) {
  if (!(first > 0.0) || !(step > 0.0) || !(last >= first) || !std::isfinite(last)) {
    throw Error(ErrorCode::BadSweepGrid, "grid needs 0 < first <= last and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid.push_back(first + static_cast<double>(i) * step);
  return grid;
}

std::vector<double> parse_threshold_grid(const std::string& text) {
  std::istringstream in(text);
  double first = 0, last = 0, step = 0;
  char c1 = 0, c2 = 0;
  if (!(in >> first >> c1 >> last >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw Error(ErrorCode::BadSweepGrid, "expected first:last:step, got '" + text + "'");
  }
  return threshold_grid(first, last, step);
}

}  // namespace anxmap
