#include <random>

#include "doctest.h"

#include "anxmap/error.hpp"
#include "anxmap/evaluation.hpp"
#include "support/fixtures.hpp"

using namespace anxmap;

namespace {

constexpr auto kAnx = ClassLabel::Anxiety;
constexpr auto kNon = ClassLabel::NonAnxiety;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anxmap::Error");
  return ErrorCode::Io;
}

// "x" occurs only in anxious training text, "y" only in non-anxious text, so
// unsmoothed scoring sends x to Anxiety and y to NonAnxiety at any threshold.
ClassifierModel xy_model() {
  return ClassifierModel::from_counts({{{"x", "NNG"}, {0, 5}}, {{"y", "NNG"}, {5, 0}}}, {1, 1},
                                      {Smoothing::Off, 1.0, default_pos_filter()});
}

void add(std::vector<LabeledSequence>& set, int n, ClassLabel gold, const char* word) {
  for (int i = 0; i < n; ++i) set.push_back({{{word, "NNG"}}, gold});
}

// 10 anxious (8 caught), 90 non-anxious (81 kept).
std::vector<LabeledSequence> ten_ninety() {
  std::vector<LabeledSequence> set;
  add(set, 8, kAnx, "x");
  add(set, 2, kAnx, "y");
  add(set, 81, kNon, "y");
  add(set, 9, kNon, "x");
  return set;
}

std::vector<LabeledSequence> random_labeled(std::mt19937_64& rng, std::size_t n, std::size_t vocab) {
  std::vector<LabeledSequence> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSequence d;
    d.label = rng() % 4 == 0 ? kAnx : kNon;
    for (std::size_t j = 0, len = 1 + rng() % 6; j < len; ++j) {
      // anxious documents lean towards the low word ids
      const std::size_t id = d.label == kAnx ? rng() % vocab / (1 + rng() % 2) : rng() % vocab;
      d.tokens.push_back({"t" + std::to_string(id), "NNG"});
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate on a hand-counted confusion matrix") {
  const auto r = evaluate(xy_model(), ten_ninety(), EvalMethod::ml_ratio(1.0), Smoothing::Off);
  CHECK(r.confusion[1][1] == 8);
  CHECK(r.confusion[1][0] == 2);
  CHECK(r.confusion[0][0] == 81);
  CHECK(r.confusion[0][1] == 9);
  CHECK(r.recall_anxiety == doctest::Approx(0.8));
  CHECK(r.recall_non_anxiety == doctest::Approx(0.9));
  CHECK(r.accuracy == doctest::Approx(0.89));
  CHECK(r.product == doctest::Approx(0.712));
  CHECK_FALSE(r.recall_anxiety_vacuous);
}

TEST_CASE("evaluate: perfect and always-NonAnxiety predictors") {
  std::vector<LabeledSequence> perfect;
  add(perfect, 10, kAnx, "x");
  add(perfect, 90, kNon, "y");
  const auto best = evaluate(xy_model(), perfect, EvalMethod::ml_ratio(1.0), Smoothing::Off);
  CHECK(best.recall_anxiety == 1.0);
  CHECK(best.recall_non_anxiety == 1.0);
  CHECK(best.accuracy == 1.0);
  CHECK(best.product == 1.0);

  // empty token lists score ratio 1, which never beats threshold 1
  std::vector<LabeledSequence> blank;
  for (int i = 0; i < 10; ++i) blank.push_back({{}, kAnx});
  for (int i = 0; i < 90; ++i) blank.push_back({{}, kNon});
  const auto r = evaluate(xy_model(), blank, EvalMethod::ml_ratio(1.0), Smoothing::Off);
  CHECK(r.recall_anxiety == 0.0);
  CHECK(r.recall_non_anxiety == 1.0);
  CHECK(r.accuracy == doctest::Approx(0.9));
  CHECK(r.product == 0.0);
}

TEST_CASE("evaluate: vacuous recall and empty test set") {
  std::vector<LabeledSequence> non_only;
  add(non_only, 5, kNon, "y");
  const auto r = evaluate(xy_model(), non_only, EvalMethod::ml_ratio(1.0), Smoothing::Off);
  CHECK(r.recall_anxiety == 1.0);
  CHECK(r.recall_anxiety_vacuous);
  CHECK_FALSE(r.recall_non_anxiety_vacuous);
  CHECK(code_of([] { evaluate(xy_model(), {}, EvalMethod::map(), Smoothing::Off); }) == ErrorCode::EmptyTestSet);
}

TEST_CASE("evaluate with MAP uses document priors") {
  const auto model = anxmap::testing::table_model(Smoothing::Off, 1.0, {1000, 100});
  std::vector<LabeledSequence> test{{anxmap::testing::seq({"w_A", "w_B", "w_D"}), kAnx}};
  CHECK(evaluate(model, test, EvalMethod::ml_ratio(1.0), Smoothing::Off).recall_anxiety == 1.0);
  CHECK(evaluate(model, test, EvalMethod::map(), Smoothing::Off).recall_anxiety == 0.0);
}

TEST_CASE("property: accuracy is the gold-weighted mean of recalls") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::array<std::array<std::uint64_t, 2>, 2> c{};
    for (auto& row : c)
      for (auto& cell : row) cell = rng() % 50;
    if (c[0][0] + c[0][1] + c[1][0] + c[1][1] == 0) continue;
    const auto r = report_from_confusion(c);
    const double ga = static_cast<double>(r.gold(kAnx)), gn = static_cast<double>(r.gold(kNon));
    const double ra = r.recall_anxiety_vacuous ? 0.0 : r.recall_anxiety;
    const double rn = r.recall_non_anxiety_vacuous ? 0.0 : r.recall_non_anxiety;
    CHECK(r.accuracy == doctest::Approx((ra * ga + rn * gn) / (ga + gn)).epsilon(1e-14));
    CHECK(r.product == r.recall_anxiety * r.accuracy);
  }
}

TEST_CASE("sweep matches per-threshold evaluation and is monotone") {
  std::mt19937_64 rng(42);
  const auto grid = threshold_grid(0.5, 5.0, 0.5);
  REQUIRE(grid.size() == 10);
  CHECK(grid[4] == 2.5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = train(random_labeled(rng, 200, 30));
    const auto test = random_labeled(rng, 100, 35);
    for (auto sm : {Smoothing::On, Smoothing::Off}) {
      const auto points = sweep(model, test, grid, sm);
      REQUIRE(points.size() == grid.size());
      for (std::size_t i = 0; i < points.size(); ++i) {
        const auto direct = evaluate(model, test, EvalMethod::ml_ratio(grid[i]), sm);
        CHECK(points[i].report.confusion == direct.confusion);
        if (i > 0) {
          CHECK(points[i].report.recall_anxiety <= points[i - 1].report.recall_anxiety);
          CHECK(points[i].report.predicted(kAnx) <= points[i - 1].report.predicted(kAnx));
        }
      }
    }
  }
}

TEST_CASE("sweep: singleton grid and argument checks") {
  const auto points = sweep(xy_model(), ten_ninety(), std::vector<double>{1.0}, Smoothing::Off);
  REQUIRE(points.size() == 1);
  CHECK(points[0].report.confusion ==
        evaluate(xy_model(), ten_ninety(), EvalMethod::ml_ratio(1.0), Smoothing::Off).confusion);
  CHECK(code_of([] { sweep(xy_model(), {}, std::vector<double>{1.0}, Smoothing::Off); }) == ErrorCode::EmptyTestSet);
  CHECK(code_of([] { sweep(xy_model(), ten_ninety(), std::vector<double>{2.0, 1.0}, Smoothing::Off); }) ==
        ErrorCode::BadSweepGrid);
  CHECK(code_of([] { sweep(xy_model(), ten_ninety(), std::vector<double>{}, Smoothing::Off); }) ==
        ErrorCode::BadSweepGrid);
  CHECK(code_of([] { sweep(xy_model(), ten_ninety(), std::vector<double>{0.0, 1.0}, Smoothing::Off); }) ==
        ErrorCode::BadSweepGrid);
}

TEST_CASE("select_threshold picks the product maximum, smallest on ties") {
  auto point = [](double t, double product) {
    SweepPoint p{t, {}};
    p.report.product = product;
    return p;
  };
  std::vector<SweepPoint> pts{point(1, 0.5), point(2.5, 0.73), point(4, 0.6)};
  const auto best = select_threshold(pts);
  CHECK(best.threshold == 2.5);
  CHECK(best.product == 0.73);

  std::vector<SweepPoint> flat{point(1, 0.4), point(2, 0.4), point(3, 0.4)};
  CHECK(select_threshold(flat).threshold == 1);
  CHECK(code_of([] { select_threshold({}); }) == ErrorCode::EmptySweep);
}

TEST_CASE("threshold grid parsing") {
  const auto g = parse_threshold_grid("0.5:5.0:0.5");
  CHECK(g.size() == 10);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 5.0);
  CHECK(parse_threshold_grid("1:1:1") == std::vector<double>{1.0});
  CHECK(parse_threshold_grid("0.1:0.3:0.1").size() == 3);
  CHECK(code_of([] { parse_threshold_grid("1:2"); }) == ErrorCode::BadSweepGrid);
  CHECK(code_of([] { parse_threshold_grid("0:2:1"); }) == ErrorCode::BadSweepGrid);
  CHECK(code_of([] { parse_threshold_grid("3:2:1"); }) == ErrorCode::BadSweepGrid);
}
