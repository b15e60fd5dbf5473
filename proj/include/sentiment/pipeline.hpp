#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentiment/evalmetrics.hpp"
#include "sentiment/features.hpp"
#include "sentiment/ingest.hpp"
#include "sentiment/linear.hpp"
#include "sentiment/neural.hpp"
#include "sentiment/textprep.hpp"

namespace sentiment {

namespace fs = std::filesystem;

/// Settings shared by every command. Loaded from a flat `key = value` file;
/// command-line flags are applied afterwards with set().
struct PipelineConfig {
  fs::path data;
  fs::path out = "bundle";
  fs::path stopwords;    // empty: builtin list
  fs::path lemma_rules;  // empty: builtin table
  std::map<std::string, std::string> columns;

  std::size_t k = 5000;
  std::size_t smote_k = 5;
  double split_fraction = 0.8;
  double valid_fraction = 0.1;  // holdout of train used for RNN early stopping
  double threshold = 0.5;
  std::uint64_t seed = 42;
  bool plots = true;

  LinearTrainConfig lr;
  NeuralTrainConfig rnn;

  PipelineConfig();

  /// Raises SchemaError on an unknown key and DomainError on a bad value.
  void set(const std::string& key, const std::string& value);
  void load_file(const fs::path& path);
  void validate() const;
  std::vector<std::string> keys() const;
};

Preprocessor make_preprocessor(const fs::path& stopwords, const fs::path& lemma_rules);

/// Named files of a prepared dataset directory.
namespace bundle_files {
inline constexpr const char* kExamples = "examples.json";
inline constexpr const char* kVocab = "vocab.json";
inline constexpr const char* kChi2 = "chi2.csv";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kBalance = "balance.json";
inline constexpr const char* kDrops = "drops.json";
}  // namespace bundle_files

struct Bundle {
  fs::path dir;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  TfidfModel tfidf;
  std::string vocab_hash;
  fs::path stopwords;
  fs::path lemma_rules;

  static Bundle load(const fs::path& dir);
  Preprocessor preprocessor() const { return make_preprocessor(stopwords, lemma_rules); }
};

/// A trained model of either kind, bound to the vocabulary it was fitted on.
struct ScoringModel {
  std::string kind;  // "logreg" or "rnn"
  std::string vocab_ref;
  std::optional<LinearModel> linear;
  std::optional<RnnModel> rnn;

  static ScoringModel load(const fs::path& path);
  void check_vocab(const Bundle& bundle) const;
  double score(const TokenSequence& tokens, const TfidfModel& tfidf) const;
  /// True when no token survives vocabulary lookup, so only the bias speaks.
  bool low_signal(const TokenSequence& tokens, const TfidfModel& tfidf) const;
};

struct PrepareSummary {
  std::size_t n_examples = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_features = 0;
  DropReport drops;
};

struct Prediction {
  SentimentLabel label = SentimentLabel::Negative;
  double p_positive = 0.5;
  bool low_signal = false;
  std::string to_json() const;
};

struct SensitivityRow {
  std::size_t id = 0;
  std::string text;
  double lr_p_positive = 0.5;
  double rnn_p_positive = 0.5;
};

std::vector<std::string> default_sensitivity_sentences();
std::vector<std::string> read_sentences(const fs::path& path);
std::string sensitivity_csv(const std::vector<SensitivityRow>& rows);

fs::path default_model_path(const PipelineConfig& cfg, const std::string& kind);

PrepareSummary cmd_prepare(const PipelineConfig& cfg);
fs::path cmd_train(const PipelineConfig& cfg, const std::string& kind,
                   const std::optional<fs::path>& model_out = std::nullopt);
EvalReport cmd_evaluate(const PipelineConfig& cfg, const fs::path& model_path);
Prediction cmd_predict(const PipelineConfig& cfg, const fs::path& model_path, const std::string& text);
std::vector<SensitivityRow> cmd_sensitivity(const PipelineConfig& cfg, const fs::path& lr_model,
                                            const fs::path& rnn_model,
                                            const std::optional<fs::path>& sentences);
std::string cmd_compare(const fs::path& baseline, const fs::path& candidate);

// SVG figures.
std::string roc_svg(const RocCurve& curve, const std::string& title);
std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title);
std::string sensitivity_svg(const std::vector<SensitivityRow>& rows);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

}  // namespace sentiment
