#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/resample.hpp"
#include "sentiment/rng.hpp"

using namespace sentiment;

namespace {

using L = SentimentLabel;

std::vector<DenseVector> random_points(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<DenseVector> out(n, DenseVector(dim));
  for (auto& p : out) {
    for (auto& v : p) v = rng.uniform(-3.0, 3.0);
  }
  return out;
}

bool on_segment(const DenseVector& s, const DenseVector& p, const DenseVector& q) {
  constexpr double eps = 1e-12;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < std::min(p[i], q[i]) - eps || s[i] > std::max(p[i], q[i]) + eps) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("interpolation endpoints and midpoint") {
  // With two minority points each parent's only neighbor is the other one.
  const std::vector<DenseVector> pts = {{0.0, 0.0}, {2.0, 2.0}};
  const auto samples = smote(pts, 200, {5, 1});
  for (const auto& s : samples) {
    const auto& p = pts[s.parent_index];
    const auto& q = pts[s.neighbor_index];
    CHECK(s.neighbor_index != s.parent_index);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(s.vector[i] == p[i] + s.lambda * (q[i] - p[i]));
    }
    CHECK(s.lambda >= 0.0);
    CHECK(s.lambda <= 1.0);
  }
  // Round-robin parents.
  CHECK(samples[0].parent_index == 0);
  CHECK(samples[1].parent_index == 1);
  CHECK(samples[2].parent_index == 0);
}

TEST_CASE("lambda 0, 0.5 and 1 through the interpolation formula") {
  const DenseVector p = {0.0, 0.0}, q = {2.0, 2.0};
  for (auto [lambda, expect] : {std::pair{0.0, DenseVector{0.0, 0.0}},
                                std::pair{0.5, DenseVector{1.0, 1.0}},
                                std::pair{1.0, DenseVector{2.0, 2.0}}}) {
    SyntheticSample s{{p[0] + lambda * (q[0] - p[0]), p[1] + lambda * (q[1] - p[1])}, 0, 1, lambda};
    CHECK(s.vector == expect);
  }
}

TEST_CASE("neighbors come from the k nearest") {
  // Points on a line; with k = 1 each parent's neighbor is its nearest.
  const std::vector<DenseVector> pts = {{0.0}, {1.0}, {10.0}, {10.5}};
  const auto samples = smote(pts, 8, {1, 4});
  const std::size_t nearest[] = {1, 0, 3, 2};
  for (const auto& s : samples) CHECK(s.neighbor_index == nearest[s.parent_index]);
}

TEST_CASE("smote preconditions") {
  CHECK_THROWS_WITH_AS(smote(std::vector<DenseVector>{{1.0}}, 3, {}),
                       "SMOTE requires >= 2 minority samples", DomainError);
  CHECK_THROWS_AS(smote(std::vector<DenseVector>{{1.0}, {1.0, 2.0}}, 1, {}), DomainError);
  CHECK_THROWS_AS(smote(std::vector<DenseVector>{{1.0}, {2.0}}, 1, {0, 1}), DomainError);
  CHECK(smote(std::vector<DenseVector>{{1.0}, {2.0}}, 0, {}).empty());
}

TEST_CASE("balance_to_parity counting") {
  Rng rng(1);
  auto x = random_points(14, 3, rng);
  std::vector<L> y(14, L::Positive);
  for (std::size_t i = 10; i < 14; ++i) y[i] = L::Negative;
  const auto b = balance_to_parity(x, y, {5, 9});
  const auto c = count_classes(b.y);
  CHECK(c.positive == 10);
  CHECK(c.negative == 10);
  CHECK(b.n_synthetic == 6);
  CHECK(b.minority == L::Negative);
  for (std::size_t i = 0; i < 14; ++i) {
    CHECK(b.x[i] == x[i]);
    CHECK(b.y[i] == y[i]);
  }
  for (std::size_t i = 14; i < 20; ++i) CHECK(b.y[i] == L::Negative);
  for (const auto& s : b.synthetic) {
    CHECK(y[s.parent_index] == L::Negative);
    CHECK(y[s.neighbor_index] == L::Negative);
  }
}

TEST_CASE("balanced input is unchanged") {
  Rng rng(2);
  const auto x = random_points(6, 2, rng);
  const std::vector<L> y = {L::Positive, L::Negative, L::Positive, L::Negative, L::Positive, L::Negative};
  const auto b = balance_to_parity(x, y, {});
  CHECK(b.x == x);
  CHECK(b.y == y);
  CHECK(b.n_synthetic == 0);
}

TEST_CASE("k clamps to minority size minus one") {
  const std::vector<DenseVector> x = {{0.0}, {1.0}, {2.0}, {5.0}, {7.0}};
  const std::vector<L> y = {L::Positive, L::Positive, L::Positive, L::Negative, L::Negative};
  const auto b = balance_to_parity(x, y, {5, 0});
  const auto c = count_classes(b.y);
  CHECK(c.positive == 3);
  CHECK(c.negative == 3);
  REQUIRE(b.synthetic.size() == 1);
  CHECK(b.synthetic[0].neighbor_index != b.synthetic[0].parent_index);
}

TEST_CASE("synthetic points lie on their segment; determinism; parity") {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n_pos = 2 + rng.below(30), n_neg = 2 + rng.below(30);
    auto x = random_points(n_pos + n_neg, 1 + rng.below(6), rng);
    std::vector<L> y;
    for (std::uint64_t i = 0; i < n_pos + n_neg; ++i) y.push_back(i < n_pos ? L::Positive : L::Negative);
    const SmoteConfig cfg{1 + rng.below(7), rng.next_u64()};
    const auto a = balance_to_parity(x, y, cfg);
    const auto b = balance_to_parity(x, y, cfg);
    const auto c = count_classes(a.y);
    CHECK(c.positive == c.negative);
    CHECK(a.x == b.x);
    for (const auto& s : a.synthetic) CHECK(on_segment(s.vector, x[s.parent_index], x[s.neighbor_index]));
  }
}

TEST_CASE("sparse and dense SMOTE agree") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 12;
    std::vector<DenseVector> dense;
    std::vector<SparseVector> sparse;
    const auto m = 2 + rng.below(15);
    for (std::uint64_t i = 0; i < m; ++i) {
      DenseVector v(dim, 0.0);
      for (auto& e : v) {
        if (rng.below(3) == 0) e = rng.uniform01();
      }
      dense.push_back(v);
      sparse.push_back(SparseVector::from_dense(v));
    }
    const SmoteConfig cfg{1 + rng.below(6), rng.next_u64()};
    const auto n = rng.below(40);
    const auto sd = smote(dense, n, cfg);
    const auto ss = smote(sparse, n, cfg);
    REQUIRE(sd.size() == ss.size());
    for (std::size_t k = 0; k < sd.size(); ++k) {
      CHECK(sd[k].parent_index == ss[k].parent_index);
      CHECK(sd[k].neighbor_index == ss[k].neighbor_index);
      CHECK(sd[k].lambda == ss[k].lambda);
      CHECK(ss[k].vector.to_dense(dim) == sd[k].vector);
    }
  }
}

TEST_CASE("class weights") {
  auto labels = [](std::size_t pos, std::size_t neg) {
    std::vector<L> y(pos, L::Positive);
    y.insert(y.end(), neg, L::Negative);
    return y;
  };
  auto w = class_weights(labels(10, 10));
  CHECK(w.positive == 1.0);
  CHECK(w.negative == 1.0);
  w = class_weights(labels(30, 10));
  CHECK(w.positive == doctest::Approx(40.0 / 60.0));
  CHECK(w.negative == 2.0);
  w = class_weights(labels(1, 3));
  CHECK(w.positive == 2.0);
  CHECK(w.negative == doctest::Approx(4.0 / 6.0));
  CHECK(30 * (40.0 / 60.0) + 10 * 2.0 == doctest::Approx(40.0));
  CHECK_THROWS_AS(class_weights(labels(5, 0)), DomainError);
}

TEST_CASE("balance report json") {
  const auto j = nlohmann::json::parse(balance_report_json({10, 4}, {10, 10}, {5, 3}));
  CHECK(j["before"]["negative"] == 4);
  CHECK(j["after"]["negative"] == 10);
  CHECK(j["synthetic"] == 6);
}
