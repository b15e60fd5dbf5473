#include "sentiment/evalmetrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sentiment/errors.hpp"

namespace sentiment {

ConfusionMatrix confusion(std::span<const SentimentLabel> y_true,
                          std::span<const SentimentLabel> y_pred) {
  if (y_true.size() != y_pred.size()) throw DomainError("label and prediction counts differ");
  if (y_true.empty()) throw DomainError("empty evaluation set");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool actual = y_true[i] == SentimentLabel::Positive;
    const bool predicted = y_pred[i] == SentimentLabel::Positive;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (actual && !predicted) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  ClassificationMetrics m;
  auto ratio = [&](std::uint64_t num, std::uint64_t den, const char* name) {
    if (den == 0) {
      m.undefined.emplace_back(name);
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(cm.tp + cm.tn, cm.total(), "accuracy");
  m.precision = ratio(cm.tp, cm.tp + cm.fp, "precision");
  m.recall = ratio(cm.tp, cm.tp + cm.fn, "recall");
  if (m.precision + m.recall == 0.0) {
    m.undefined.emplace_back("f1");
    m.f1 = 0.0;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const SentimentLabel> labels) {
  if (scores.size() != labels.size()) throw DomainError("score and label counts differ");
  std::uint64_t n_pos = 0;
  for (auto l : labels) n_pos += l == SentimentLabel::Positive;
  const std::uint64_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DomainError("ROC AUC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  // Twice the area in pair units, kept integral until the final division.
  std::uint64_t twice_area = 0;
  std::uint64_t cum_pos = 0, cum_neg = 0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t j = k;
    std::uint64_t pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[k]]) {
      (labels[order[j]] == SentimentLabel::Positive ? pos : neg)++;
      ++j;
    }
    twice_area += neg * (2 * cum_pos + pos);
    cum_pos += pos;
    cum_neg += neg;
    curve.points.push_back({static_cast<double>(cum_neg) / static_cast<double>(n_neg),
                            static_cast<double>(cum_pos) / static_cast<double>(n_pos)});
    k = j;
  }
  curve.auc = static_cast<double>(twice_area) /
              (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

EvalReport evaluate_scores(std::span<const double> p_positive,
                           std::span<const SentimentLabel> labels, std::string model_kind,
                           double threshold) {
  if (p_positive.empty()) throw DomainError("empty evaluation set");
  if (p_positive.size() != labels.size()) throw DomainError("score and label counts differ");
  std::vector<SentimentLabel> pred;
  pred.reserve(p_positive.size());
  for (double p : p_positive) {
    pred.push_back(p >= threshold ? SentimentLabel::Positive : SentimentLabel::Negative);
  }
  EvalReport r;
  r.model_kind = std::move(model_kind);
  r.threshold = threshold;
  r.n_examples = labels.size();
  r.confusion = confusion(labels, pred);
  r.metrics = classification_metrics(r.confusion);
  r.roc = roc_auc(p_positive, labels);
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["model"] = model_kind;
  j["n_examples"] = n_examples;
  j["threshold"] = threshold;
  j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn},
                    {"tn", confusion.tn}};
  j["metrics"] = {{"accuracy", metrics.accuracy},
                  {"precision", metrics.precision},
                  {"recall", metrics.recall},
                  {"f1", metrics.f1},
                  {"undefined", metrics.undefined}};
  auto roc_pts = nlohmann::ordered_json::array();
  for (const auto& p : roc.points) roc_pts.push_back({p.fpr, p.tpr});
  j["roc"] = std::move(roc_pts);
  j["auc"] = roc.auc;
  if (!notes.empty()) j["notes"] = notes;
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1) throw IoError("unsupported report version");
    EvalReport r;
    r.model_kind = j.value("model", "");
    r.n_examples = j.value("n_examples", std::size_t{0});
    r.threshold = j.value("threshold", 0.5);
    const auto& c = j.at("confusion");
    r.confusion = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
                   c.at("fn").get<std::uint64_t>(), c.at("tn").get<std::uint64_t>()};
    const auto& m = j.at("metrics");
    r.metrics.accuracy = m.at("accuracy").get<double>();
    r.metrics.precision = m.at("precision").get<double>();
    r.metrics.recall = m.at("recall").get<double>();
    r.metrics.f1 = m.at("f1").get<double>();
    r.metrics.undefined = m.value("undefined", std::vector<std::string>{});
    for (const auto& p : j.at("roc")) r.roc.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    r.roc.auc = j.at("auc").get<double>();
    r.notes = j.value("notes", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed evaluation report: ") + e.what());
  }
}

std::vector<MetricDelta> compare_reports(const EvalReport& baseline, const EvalReport& candidate) {
  auto row = [](std::string name, double b, double c) { return MetricDelta{std::move(name), b, c, c - b}; };
  return {row("accuracy", baseline.metrics.accuracy, candidate.metrics.accuracy),
          row("precision", baseline.metrics.precision, candidate.metrics.precision),
          row("recall", baseline.metrics.recall, candidate.metrics.recall),
          row("f1", baseline.metrics.f1, candidate.metrics.f1),
          row("auc", baseline.roc.auc, candidate.roc.auc)};
}

std::string format_comparison(const std::vector<MetricDelta>& rows, const std::string& baseline_name,
                              const std::string& candidate_name) {
  std::ostringstream os;
  os << "| metric | " << baseline_name << " | " << candidate_name << " | delta |\n";
  os << "|---|---|---|---|\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "| %s | %.4f | %.4f | %+.4f |\n", r.metric.c_str(), r.baseline,
                  r.candidate, r.delta);
    os << buf;
  }
  return os.str();
}

}  // namespace sentiment
