#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sentiment/ingest.hpp"

namespace sentiment {

/// Positive is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const SentimentLabel> y_true,
                          std::span<const SentimentLabel> y_pred);

/// A metric whose denominator is zero is reported as 0 and named in
/// `undefined`.
struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<std::string> undefined;
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

/// Sweeps a threshold through every distinct score, highest first. Tied
/// scores move along a diagonal, which credits tied pairs with one half, so
/// the trapezoidal area equals the pair-counting statistic.
RocCurve roc_auc(std::span<const double> scores, std::span<const SentimentLabel> labels);

struct EvalReport {
  std::string model_kind;
  ConfusionMatrix confusion;
  ClassificationMetrics metrics;
  RocCurve roc;
  double threshold = 0.5;
  std::size_t n_examples = 0;
  std::vector<std::string> notes;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

/// Scores at a threshold -> full report. Raises DomainError("empty
/// evaluation set") for no examples.
EvalReport evaluate_scores(std::span<const double> p_positive,
                           std::span<const SentimentLabel> labels, std::string model_kind,
                           double threshold = 0.5);

struct MetricDelta {
  std::string metric;
  double baseline = 0.0;
  double candidate = 0.0;
  double delta = 0.0;  // candidate - baseline
};

std::vector<MetricDelta> compare_reports(const EvalReport& baseline, const EvalReport& candidate);

/// Markdown-style comparison table.
std::string format_comparison(const std::vector<MetricDelta>& rows, const std::string& baseline_name,
                              const std::string& candidate_name);

}  // namespace sentiment
