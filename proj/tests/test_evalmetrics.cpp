#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "json.hpp"
#include "oracles.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/evalmetrics.hpp"
#include "sentiment/rng.hpp"

using namespace sentiment;
using L = SentimentLabel;

TEST_CASE("confusion counts") {
  const std::vector<L> t = {L::Positive, L::Positive, L::Negative, L::Negative, L::Positive};
  CHECK(confusion(t, t) == ConfusionMatrix{3, 0, 0, 2});
  const std::vector<L> p = {L::Positive, L::Negative, L::Positive, L::Negative, L::Positive};
  CHECK(confusion(t, p) == ConfusionMatrix{2, 1, 1, 1});
  CHECK_THROWS_AS(confusion(t, std::vector<L>(2, L::Positive)), DomainError);
}

TEST_CASE("metrics from the reported RNN confusion counts") {
  const auto m = classification_metrics({2184, 422, 381, 1009});
  CHECK(m.accuracy == doctest::Approx(0.7990).epsilon(1e-4));
  CHECK(m.precision == doctest::Approx(0.8381).epsilon(1e-4));
  CHECK(m.recall == doctest::Approx(0.8515).epsilon(1e-4));
  CHECK(m.f1 == doctest::Approx(0.8447).epsilon(1e-4));
  CHECK(m.undefined.empty());
}

TEST_CASE("metrics from the reported LR confusion counts") {
  const auto m = classification_metrics({1387, 422, 475, 1718});
  CHECK(m.accuracy == doctest::Approx(0.7759).epsilon(1e-4));
  CHECK(m.precision == doctest::Approx(0.7667).epsilon(1e-4));
  CHECK(m.recall == doctest::Approx(0.7449).epsilon(1e-4));
  CHECK(m.f1 == doctest::Approx(0.7557).epsilon(1e-4));
}

TEST_CASE("perfect predictor and zero denominators") {
  const auto m = classification_metrics({5, 0, 0, 5});
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);

  const auto none = classification_metrics({0, 0, 3, 4});
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.undefined == std::vector<std::string>{"precision", "f1"});
}

TEST_CASE("swapping the positive class preserves accuracy") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    ConfusionMatrix cm{1 + rng.below(50), rng.below(50), rng.below(50), 1 + rng.below(50)};
    ConfusionMatrix flipped{cm.tn, cm.fn, cm.fp, cm.tp};
    CHECK(classification_metrics(cm).accuracy == classification_metrics(flipped).accuracy);
  }
}

TEST_CASE("roc edge cases") {
  const std::vector<L> y = {L::Positive, L::Positive, L::Negative, L::Negative};
  CHECK(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y).auc == 1.0);
  CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y).auc == 0.0);
  const auto tied = roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y);
  CHECK(tied.auc == 0.5);
  CHECK(tied.points.size() == 2);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<L>(2, L::Positive)), DomainError);
}

TEST_CASE("trapezoid AUC equals pair counting") {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 2 + rng.below(199);
    std::vector<double> s;
    std::vector<L> y;
    for (std::uint64_t i = 0; i < n; ++i) {
      // Coarse grid forces ties.
      s.push_back(static_cast<double>(rng.below(25)) / 24.0);
      y.push_back(rng.below(2) ? L::Positive : L::Negative);
    }
    y[0] = L::Positive;
    y[1] = L::Negative;
    const auto curve = roc_auc(s, y);
    CHECK(std::abs(curve.auc - oracle::auc_pair_counting(s, y)) <= 1e-12);
  }
}

TEST_CASE("roc curve shape and monotone invariance") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 2 + rng.below(80);
    std::vector<double> s, t;
    std::vector<L> y;
    for (std::uint64_t i = 0; i < n; ++i) {
      s.push_back(rng.uniform(-3, 3));
      y.push_back(i % 2 ? L::Positive : L::Negative);
    }
    for (double v : s) t.push_back(std::exp(2.0 * v) + 1.0);
    const auto c = roc_auc(s, y);
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
    for (std::size_t k = 1; k < c.points.size(); ++k) {
      CHECK(c.points[k].fpr >= c.points[k - 1].fpr);
      CHECK(c.points[k].tpr >= c.points[k - 1].tpr);
    }
    CHECK(c.auc >= 0.0);
    CHECK(c.auc <= 1.0);
    CHECK(roc_auc(t, y).auc == c.auc);
  }
}

TEST_CASE("evaluation report") {
  const std::vector<double> p = {0.9, 0.6, 0.4, 0.2};
  const std::vector<L> y = {L::Positive, L::Negative, L::Positive, L::Negative};
  const auto r = evaluate_scores(p, y, "logreg");
  CHECK(r.confusion == ConfusionMatrix{1, 1, 1, 1});
  CHECK(r.roc.auc == 0.75);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["confusion"]["tp"] == 1);
  CHECK(j["auc"] == 0.75);
  CHECK(j["roc"].size() == r.roc.points.size());
  const auto back = EvalReport::from_json(r.to_json());
  CHECK(back.confusion == r.confusion);
  CHECK(back.roc.auc == r.roc.auc);
  CHECK_THROWS_WITH_AS(evaluate_scores({}, {}, "x"), "empty evaluation set", DomainError);
}

TEST_CASE("comparison deltas") {
  EvalReport a, b;
  a.metrics = {0.77, 0.77, 0.76, 0.77, {}};
  b.metrics = {0.80, 0.83, 0.85, 0.84, {}};
  a.roc.auc = 0.86;
  b.roc.auc = 0.88;
  const auto rows = compare_reports(a, b);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].delta == doctest::Approx(0.03));
  CHECK(rows[4].metric == "auc");
  CHECK(rows[4].delta == doctest::Approx(0.02));
  const auto table = format_comparison(rows, "LR", "RNN");
  CHECK(table.find("| accuracy | 0.7700 | 0.8000 | +0.0300 |") != std::string::npos);
}
