#include "sentiment/linear.hpp"

#include <cmath>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/resample.hpp"

namespace sentiment {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

SentimentLabel classify(double p_positive, double threshold) {
  return p_positive >= threshold ? SentimentLabel::Positive : SentimentLabel::Negative;
}

double LinearModel::logit(const SparseVector& x) const { return x.dot(weights) + bias; }

std::string LinearModel::to_json(const std::string& vocab_ref) const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["kind"] = "logreg";
  j["weights"] = weights;
  j["bias"] = bias;
  j["vocab_ref"] = vocab_ref;
  return j.dump() + "\n";
}

std::pair<LinearModel, std::string> LinearModel::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1 || j.value("kind", "") != "logreg") {
      throw IoError("not a version-1 logreg model file");
    }
    LinearModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    return {std::move(m), j.at("vocab_ref").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed logreg model file: ") + e.what());
  }
}

namespace {

double target(SentimentLabel l) { return l == SentimentLabel::Positive ? 1.0 : 0.0; }

void check_inputs(const std::vector<SparseVector>& x, const std::vector<SentimentLabel>& y) {
  if (x.empty() || x.size() != y.size()) {
    throw DomainError("training needs a non-empty feature set with one label per row");
  }
}

}  // namespace

double linear_loss(const LinearModel& m, const std::vector<SparseVector>& x,
                   const std::vector<SentimentLabel>& y, double l2) {
  check_inputs(x, y);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = m.logit(x[i]);
    total += softplus(z) - target(y[i]) * z;
  }
  double wsq = 0.0;
  for (double w : m.weights) wsq += w * w;
  return total / static_cast<double>(x.size()) + 0.5 * l2 * wsq;
}

LinearGradient linear_gradient(const LinearModel& m, const std::vector<SparseVector>& x,
                               const std::vector<SentimentLabel>& y, double l2) {
  check_inputs(x, y);
  LinearGradient g{std::vector<double>(m.dim(), 0.0), 0.0};
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (sigmoid(m.logit(x[i])) - target(y[i])) * inv_n;
    for (const auto& e : x[i].entries) g.weights[e.index] += r * e.weight;
    g.bias += r;
  }
  for (std::size_t k = 0; k < m.dim(); ++k) g.weights[k] += l2 * m.weights[k];
  return g;
}

LinearTrainResult train_lr(const std::vector<SparseVector>& x, const std::vector<SentimentLabel>& y,
                           std::size_t dim, const LinearTrainConfig& cfg) {
  check_inputs(x, y);
  class_weights(y);  // both classes present
  if (!(cfg.learning_rate > 0.0) || cfg.epochs == 0 || cfg.l2 < 0.0) {
    throw DomainError("invalid logistic-regression training configuration");
  }
  for (const auto& v : x) {
    if (v.extent() > dim) throw DomainError("feature index exceeds model dimension");
  }

  LinearTrainResult result{LinearModel(dim), 0.0, {}};
  auto& model = result.model;
  double loss = linear_loss(model, x, y, cfg.l2);
  result.initial_loss = loss;
  double rate = cfg.learning_rate;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto g = linear_gradient(model, x, y, cfg.l2);
    for (int attempt = 0; attempt < 60; ++attempt) {
      LinearModel trial = model;
      for (std::size_t k = 0; k < dim; ++k) trial.weights[k] -= rate * g.weights[k];
      trial.bias -= rate * g.bias;
      const double trial_loss = linear_loss(trial, x, y, cfg.l2);
      if (!std::isfinite(trial_loss)) {
        throw DomainError("logistic regression diverged at epoch " + std::to_string(epoch));
      }
      if (trial_loss <= loss) {
        model = std::move(trial);
        loss = trial_loss;
        break;
      }
      rate *= 0.5;
    }
    result.log.push_back({epoch, loss, rate});
  }
  return result;
}

}  // namespace sentiment
