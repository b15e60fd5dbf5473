#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sentiment/features.hpp"
#include "sentiment/ingest.hpp"

namespace sentiment {

/// 1 / (1 + e^-z), evaluated on the side that cannot overflow.
double sigmoid(double z);

/// ln(1 + e^z) without overflow.
double softplus(double z);

SentimentLabel classify(double p_positive, double threshold = 0.5);

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  explicit LinearModel(std::size_t dim = 0) : weights(dim, 0.0) {}

  std::size_t dim() const { return weights.size(); }
  double logit(const SparseVector& x) const;
  /// Raises DomainError when x has an index outside the model dimension.
  double predict_proba(const SparseVector& x) const { return sigmoid(logit(x)); }

  std::string to_json(const std::string& vocab_ref) const;
  /// Returns the model and the vocab_ref it was bound to.
  static std::pair<LinearModel, std::string> from_json(const std::string& text);
};

struct LinearTrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double l2 = 1e-4;
  std::uint64_t seed = 0;  // unused by full-batch descent; kept for config symmetry
};

struct LinearEpoch {
  std::size_t epoch = 0;
  double loss = 0.0;
  double learning_rate = 0.0;
};

struct LinearTrainResult {
  LinearModel model;
  double initial_loss = 0.0;
  std::vector<LinearEpoch> log;
};

struct LinearGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

/// Mean binary cross-entropy plus (l2 / 2) * |w|^2.
double linear_loss(const LinearModel& m, const std::vector<SparseVector>& x,
                   const std::vector<SentimentLabel>& y, double l2);

LinearGradient linear_gradient(const LinearModel& m, const std::vector<SparseVector>& x,
                               const std::vector<SentimentLabel>& y, double l2);

/// Full-batch gradient descent from a zero model. A step that would raise
/// the loss is rejected and retried at half the rate, so the logged loss
/// never increases.
LinearTrainResult train_lr(const std::vector<SparseVector>& x, const std::vector<SentimentLabel>& y,
                           std::size_t dim, const LinearTrainConfig& cfg);

}  // namespace sentiment
