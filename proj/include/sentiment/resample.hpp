#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sentiment/features.hpp"
#include "sentiment/ingest.hpp"

namespace sentiment {

using DenseVector = std::vector<double>;

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 0;
};

template <typename Vec>
struct BasicSyntheticSample {
  Vec vector;
  std::size_t parent_index = 0;
  std::size_t neighbor_index = 0;
  double lambda = 0.0;
};

using SyntheticSample = BasicSyntheticSample<DenseVector>;
using SparseSyntheticSample = BasicSyntheticSample<SparseVector>;

/// SMOTE. Parents are taken round-robin over the minority set; each
/// parent's neighbor is drawn uniformly from its min(k, m - 1) Euclidean
/// nearest neighbors (distance ties broken by lower index) and lambda is
/// drawn from U[0, 1]. Requires at least two minority samples.
std::vector<SyntheticSample> smote(const std::vector<DenseVector>& minority, std::size_t n_new,
                                   const SmoteConfig& cfg);

/// Same algorithm over sparse vectors; produces the same samples as the
/// dense overload on the densified inputs.
std::vector<SparseSyntheticSample> smote(const std::vector<SparseVector>& minority,
                                         std::size_t n_new, const SmoteConfig& cfg);

template <typename Vec>
struct Balanced {
  std::vector<Vec> x;
  std::vector<SentimentLabel> y;
  std::size_t n_synthetic = 0;
  SentimentLabel minority = SentimentLabel::Negative;
  // Parent/neighbor indices refer to positions in the original x.
  std::vector<BasicSyntheticSample<Vec>> synthetic;
};

/// Appends synthetic minority samples until both classes have equal counts.
/// Originals are kept verbatim and first.
Balanced<DenseVector> balance_to_parity(const std::vector<DenseVector>& x,
                                        const std::vector<SentimentLabel>& y,
                                        const SmoteConfig& cfg);
Balanced<SparseVector> balance_to_parity(const std::vector<SparseVector>& x,
                                         const std::vector<SentimentLabel>& y,
                                         const SmoteConfig& cfg);

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;

  double operator()(SentimentLabel l) const {
    return l == SentimentLabel::Positive ? positive : negative;
  }
};

/// w_c = N / (2 * count_c). Raises DomainError unless both classes occur.
ClassWeights class_weights(const std::vector<SentimentLabel>& y);

struct ClassCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

ClassCounts count_classes(const std::vector<SentimentLabel>& y);

/// Before/after class counts as JSON.
std::string balance_report_json(ClassCounts before, ClassCounts after, const SmoteConfig& cfg);

}  // namespace sentiment
