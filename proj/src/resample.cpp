#include "sentiment/resample.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/rng.hpp"

namespace sentiment {

namespace {

double squared_distance(const DenseVector& p, const DenseVector& q) {
  if (p.size() != q.size()) throw DomainError("SMOTE vectors differ in dimensionality");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return s;
}

// Coordinates are visited in increasing index order, skipping coordinates
// where both vectors are zero, so the sum matches the dense loop exactly.
double squared_distance(const SparseVector& p, const SparseVector& q) {
  double s = 0.0;
  auto a = p.entries.begin(), b = q.entries.begin();
  while (a != p.entries.end() || b != q.entries.end()) {
    double d;
    if (b == q.entries.end() || (a != p.entries.end() && a->index < b->index)) {
      d = a->weight;
      ++a;
    } else if (a == p.entries.end() || b->index < a->index) {
      d = -b->weight;
      ++b;
    } else {
      d = a->weight - b->weight;
      ++a;
      ++b;
    }
    s += d * d;
  }
  return s;
}

DenseVector interpolate(const DenseVector& p, const DenseVector& q, double lambda) {
  DenseVector out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] + lambda * (q[i] - p[i]);
  return out;
}

SparseVector interpolate(const SparseVector& p, const SparseVector& q, double lambda) {
  SparseVector out;
  auto a = p.entries.begin(), b = q.entries.begin();
  while (a != p.entries.end() || b != q.entries.end()) {
    std::size_t idx;
    double pv = 0.0, qv = 0.0;
    if (b == q.entries.end() || (a != p.entries.end() && a->index < b->index)) {
      idx = a->index;
      pv = a->weight;
      ++a;
    } else if (a == p.entries.end() || b->index < a->index) {
      idx = b->index;
      qv = b->weight;
      ++b;
    } else {
      idx = a->index;
      pv = a->weight;
      qv = b->weight;
      ++a;
      ++b;
    }
    const double v = pv + lambda * (qv - pv);
    if (v != 0.0) out.entries.push_back({idx, v});
  }
  return out;
}

void check_dims(const std::vector<DenseVector>& xs) {
  for (const auto& x : xs) {
    if (x.size() != xs.front().size()) throw DomainError("SMOTE vectors differ in dimensionality");
  }
}

void check_dims(const std::vector<SparseVector>&) {}

template <typename Vec>
std::vector<BasicSyntheticSample<Vec>> smote_impl(const std::vector<Vec>& minority,
                                                  std::size_t n_new, const SmoteConfig& cfg) {
  if (minority.size() < 2) throw DomainError("SMOTE requires >= 2 minority samples");
  if (cfg.k_neighbors < 1) throw DomainError("SMOTE k_neighbors must be >= 1");
  check_dims(minority);

  const std::size_t m = minority.size();
  const std::size_t k = std::min(cfg.k_neighbors, m - 1);

  std::vector<std::vector<std::size_t>> neighbors(m);
  std::vector<double> dist(m);
  std::vector<std::size_t> order;
  // Only parents that will actually be used need a neighbor list.
  for (std::size_t p = 0; p < std::min(m, n_new); ++p) {
    for (std::size_t q = 0; q < m; ++q) {
      dist[q] = q == p ? 0.0 : squared_distance(minority[p], minority[q]);
    }
    order.clear();
    for (std::size_t q = 0; q < m; ++q) {
      if (q != p) order.push_back(q);
    }
    auto closer = [&](std::size_t x, std::size_t y) {
      return dist[x] != dist[y] ? dist[x] < dist[y] : x < y;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      closer);
    neighbors[p].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }

  Rng rng(cfg.seed);
  std::vector<BasicSyntheticSample<Vec>> out;
  out.reserve(n_new);
  for (std::size_t s = 0; s < n_new; ++s) {
    const std::size_t parent = s % m;
    const std::size_t neighbor = neighbors[parent][rng.below(k)];
    const double lambda = rng.uniform01();
    out.push_back({interpolate(minority[parent], minority[neighbor], lambda), parent, neighbor,
                   lambda});
  }
  return out;
}

template <typename Vec>
Balanced<Vec> balance_impl(const std::vector<Vec>& x, const std::vector<SentimentLabel>& y,
                           const SmoteConfig& cfg) {
  if (x.size() != y.size()) throw DomainError("feature and label counts differ");
  const auto counts = count_classes(y);
  if (counts.positive == 0 || counts.negative == 0) {
    throw DomainError("balancing requires both classes");
  }
  Balanced<Vec> out;
  out.x = x;
  out.y = y;
  if (counts.positive == counts.negative) return out;

  out.minority = counts.positive < counts.negative ? SentimentLabel::Positive
                                                   : SentimentLabel::Negative;
  std::vector<std::size_t> minority_rows;
  std::vector<Vec> minority;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == out.minority) {
      minority_rows.push_back(i);
      minority.push_back(x[i]);
    }
  }
  const std::size_t n_new = std::max(counts.positive, counts.negative) - minority.size();
  auto samples = smote_impl(minority, n_new, cfg);
  for (auto& s : samples) {
    s.parent_index = minority_rows[s.parent_index];
    s.neighbor_index = minority_rows[s.neighbor_index];
    out.x.push_back(s.vector);
    out.y.push_back(out.minority);
  }
  out.n_synthetic = samples.size();
  out.synthetic = std::move(samples);
  return out;
}

}  // namespace

std::vector<SyntheticSample> smote(const std::vector<DenseVector>& minority, std::size_t n_new,
                                   const SmoteConfig& cfg) {
  return smote_impl(minority, n_new, cfg);
}

std::vector<SparseSyntheticSample> smote(const std::vector<SparseVector>& minority,
                                         std::size_t n_new, const SmoteConfig& cfg) {
  return smote_impl(minority, n_new, cfg);
}

Balanced<DenseVector> balance_to_parity(const std::vector<DenseVector>& x,
                                        const std::vector<SentimentLabel>& y,
                                        const SmoteConfig& cfg) {
  return balance_impl(x, y, cfg);
}

Balanced<SparseVector> balance_to_parity(const std::vector<SparseVector>& x,
                                         const std::vector<SentimentLabel>& y,
                                         const SmoteConfig& cfg) {
  return balance_impl(x, y, cfg);
}

ClassCounts count_classes(const std::vector<SentimentLabel>& y) {
  ClassCounts c;
  for (auto l : y) (l == SentimentLabel::Positive ? c.positive : c.negative)++;
  return c;
}

ClassWeights class_weights(const std::vector<SentimentLabel>& y) {
  const auto c = count_classes(y);
  if (c.positive == 0 || c.negative == 0) throw DomainError("class weights need both classes");
  const double n = static_cast<double>(y.size());
  return {n / (2.0 * static_cast<double>(c.positive)), n / (2.0 * static_cast<double>(c.negative))};
}

std::string balance_report_json(ClassCounts before, ClassCounts after, const SmoteConfig& cfg) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["method"] = "smote";
  j["k_neighbors"] = cfg.k_neighbors;
  j["seed"] = cfg.seed;
  j["before"] = {{"positive", before.positive}, {"negative", before.negative}};
  j["after"] = {{"positive", after.positive}, {"negative", after.negative}};
  j["synthetic"] = (after.positive + after.negative) - (before.positive + before.negative);
  return j.dump(2) + "\n";
}

}  // namespace sentiment
