#include "sentiment/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/resample.hpp"

namespace sentiment {

using ojson = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError("invalid value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw DomainError("invalid value '" + value + "' for " + key);
}

SentimentLabel parse_label(const std::string& s) {
  if (s == "Positive") return SentimentLabel::Positive;
  if (s == "Negative") return SentimentLabel::Negative;
  throw IoError("unknown label '" + s + "'");
}

std::string path_or_builtin(const fs::path& p) {
  return p.empty() ? "builtin" : fs::absolute(p).lexically_normal().string();
}

fs::path builtin_or_path(const std::string& s) { return s == "builtin" ? fs::path{} : fs::path{s}; }

std::vector<SentimentLabel> labels_of(const std::vector<LabeledExample>& xs) {
  std::vector<SentimentLabel> y;
  y.reserve(xs.size());
  for (const auto& x : xs) y.push_back(x.label);
  return y;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

ojson parse_json_file(const fs::path& path) {
  try {
    return ojson::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": invalid JSON: " + e.what());
  }
}

void require_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("bundle directory not found: " + dir.string());
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << text;
  if (!out) throw IoError("failed writing file: " + path.string());
}

// ---- configuration -------------------------------------------------------

PipelineConfig::PipelineConfig() {
  rnn.epochs = 10;
  rnn.batch_size = 32;
  rnn.patience = 3;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  using std::size_t;
  if (key == "data") {
    data = value;
  } else if (key == "out") {
    out = value;
  } else if (key == "stopwords") {
    stopwords = value;
  } else if (key == "lemma_rules") {
    lemma_rules = value;
  } else if (key.rfind("columns.", 0) == 0) {
    ColumnSchema probe;
    probe.apply({{key.substr(8), value}});
    columns[key.substr(8)] = value;
  } else if (key == "k") {
    k = parse_number<size_t>(key, value);
  } else if (key == "smote_k") {
    smote_k = parse_number<size_t>(key, value);
  } else if (key == "split_fraction") {
    split_fraction = parse_number<double>(key, value);
  } else if (key == "valid_fraction") {
    valid_fraction = parse_number<double>(key, value);
  } else if (key == "threshold") {
    threshold = parse_number<double>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "plots") {
    plots = parse_bool(key, value);
  } else if (key == "lr.learning_rate") {
    lr.learning_rate = parse_number<double>(key, value);
  } else if (key == "lr.epochs") {
    lr.epochs = parse_number<size_t>(key, value);
  } else if (key == "lr.l2") {
    lr.l2 = parse_number<double>(key, value);
  } else if (key == "rnn.embed_dim") {
    rnn.dims.embed_dim = parse_number<size_t>(key, value);
  } else if (key == "rnn.hidden") {
    rnn.dims.hidden = parse_number<size_t>(key, value);
  } else if (key == "rnn.attn_dim") {
    rnn.dims.attn_dim = parse_number<size_t>(key, value);
  } else if (key == "rnn.max_len") {
    rnn.dims.max_len = parse_number<size_t>(key, value);
  } else if (key == "rnn.epochs") {
    rnn.epochs = parse_number<size_t>(key, value);
  } else if (key == "rnn.batch_size") {
    rnn.batch_size = parse_number<size_t>(key, value);
  } else if (key == "rnn.learning_rate") {
    rnn.adam.learning_rate = parse_number<double>(key, value);
  } else if (key == "rnn.patience") {
    rnn.patience = parse_number<size_t>(key, value);
  } else {
    throw SchemaError("unknown configuration key '" + key + "'");
  }
}

std::vector<std::string> PipelineConfig::keys() const {
  return {"data",           "out",           "stopwords",       "lemma_rules",    "columns.<field>",
          "k",              "smote_k",       "split_fraction",  "valid_fraction", "threshold",
          "seed",           "plots",         "lr.learning_rate", "lr.epochs",     "lr.l2",
          "rnn.embed_dim",  "rnn.hidden",    "rnn.attn_dim",    "rnn.max_len",    "rnn.epochs",
          "rnn.batch_size", "rnn.learning_rate", "rnn.patience"};
}

void PipelineConfig::load_file(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line, section;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto where = path.string() + ":" + std::to_string(n) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw SchemaError(where + "malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw SchemaError(where + "expected 'key = value'");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!section.empty()) key = section + "." + key;
    try {
      set(key, value);
    } catch (const SchemaError& e) {
      throw SchemaError(where + e.what());
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    }
  }
}

void PipelineConfig::validate() const {
  auto fraction = [](double f, const char* name) {
    if (!(f > 0.0 && f < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
  };
  fraction(split_fraction, "split_fraction");
  fraction(valid_fraction, "valid_fraction");
  fraction(threshold, "threshold");
  if (k == 0) throw DomainError("k must be >= 1");
  if (smote_k == 0) throw DomainError("smote_k must be >= 1");
  if (!(lr.learning_rate > 0.0)) throw DomainError("lr.learning_rate must be positive");
  if (lr.l2 < 0.0) throw DomainError("lr.l2 must be non-negative");
  if (!(rnn.adam.learning_rate > 0.0)) throw DomainError("rnn.learning_rate must be positive");
  const auto& d = rnn.dims;
  if (d.embed_dim == 0 || d.hidden == 0 || d.attn_dim == 0 || d.max_len == 0 || rnn.batch_size == 0) {
    throw DomainError("network dimensions and batch size must be >= 1");
  }
}

Preprocessor make_preprocessor(const fs::path& stopwords, const fs::path& lemma_rules) {
  return Preprocessor(stopwords.empty() ? StopwordList::builtin() : StopwordList::from_file(stopwords),
                      lemma_rules.empty() ? LemmaRuleTable::builtin()
                                          : LemmaRuleTable::from_file(lemma_rules));
}

// ---- bundle --------------------------------------------------------------

Bundle Bundle::load(const fs::path& dir) {
  require_bundle(dir);
  Bundle b;
  b.dir = dir;
  const auto vocab_path = dir / bundle_files::kVocab;
  const auto vocab_text = read_text_file(vocab_path);
  b.tfidf = TfidfModel::from_json(vocab_text);
  const auto vj = ojson::parse(vocab_text);
  b.vocab_hash = b.tfidf.vocab().hash();
  if (vj.value("hash", "") != b.vocab_hash) {
    throw IoError(vocab_path.string() + ": stored hash does not match its terms");
  }
  try {
    b.stopwords = builtin_or_path(vj.at("textprep").at("stopwords").get<std::string>());
    b.lemma_rules = builtin_or_path(vj.at("textprep").at("lemma_rules").get<std::string>());

    const auto examples_path = dir / bundle_files::kExamples;
    const auto ej = parse_json_file(examples_path);
    if (ej.value("version", 0) != 1) throw IoError(examples_path.string() + ": unsupported version");
    for (const auto& e : ej.at("examples")) {
      LabeledExample x;
      x.id = e.at("id").get<std::size_t>();
      x.tokens = e.at("tokens").get<std::vector<std::string>>();
      x.raw_comment = e.at("comment").get<std::string>();
      x.label = parse_label(e.at("label").get<std::string>());
      const auto part = e.at("split").get<std::string>();
      if (part == "train") {
        b.train.push_back(std::move(x));
      } else if (part == "test") {
        b.test.push_back(std::move(x));
      } else {
        throw IoError(examples_path.string() + ": unknown split '" + part + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(dir.string() + ": malformed bundle: " + e.what());
  }
  return b;
}

// ---- models --------------------------------------------------------------

ScoringModel ScoringModel::load(const fs::path& path) {
  const auto text = read_text_file(path);
  std::string kind;
  try {
    kind = nlohmann::json::parse(text).value("kind", "");
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": invalid JSON: " + e.what());
  }
  ScoringModel m;
  m.kind = kind;
  if (kind == "logreg") {
    auto [lm, ref] = LinearModel::from_json(text);
    m.linear = std::move(lm);
    m.vocab_ref = ref;
  } else if (kind == "rnn") {
    auto [rm, ref] = RnnModel::from_json(text);
    m.rnn = std::move(rm);
    m.vocab_ref = ref;
  } else {
    throw IoError(path.string() + ": unknown model kind '" + kind + "'");
  }
  return m;
}

void ScoringModel::check_vocab(const Bundle& bundle) const {
  if (vocab_ref != bundle.vocab_hash) {
    throw DomainError("vocabulary hash mismatch: model " + vocab_ref + ", bundle " + bundle.vocab_hash);
  }
  const auto dim = linear ? linear->dim() : rnn->vocab_size;
  if (dim != bundle.tfidf.dim()) throw DomainError("model dimension does not match the bundle vocabulary");
}

double ScoringModel::score(const TokenSequence& tokens, const TfidfModel& tfidf) const {
  if (linear) return linear->predict_proba(tfidf.transform(tokens));
  const auto ids = encode(tfidf.vocab(), tokens, rnn->dims.max_len);
  return predict_sequence(*rnn, ids);
}

bool ScoringModel::low_signal(const TokenSequence& tokens, const TfidfModel& tfidf) const {
  return std::none_of(tokens.begin(), tokens.end(),
                      [&](const std::string& t) { return tfidf.vocab().find(t) >= 0; });
}

fs::path default_model_path(const PipelineConfig& cfg, const std::string& kind) {
  return cfg.out / ("model-" + kind + ".json");
}

// ---- commands ------------------------------------------------------------

PrepareSummary cmd_prepare(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.data.empty()) throw DomainError("no input data given (use --data PATH)");
  std::ifstream in(cfg.data, std::ios::binary);
  if (!in) throw IoError("cannot read data file: " + cfg.data.string());
  ColumnSchema schema;
  schema.apply(cfg.columns);
  ParseResult parsed;
  try {
    parsed = parse_csv(in, schema);
  } catch (const SchemaError& e) {
    throw SchemaError(cfg.data.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(cfg.data.string() + ": " + e.what());
  }

  const auto prep = make_preprocessor(cfg.stopwords, cfg.lemma_rules);
  std::vector<LabeledExample> examples;
  std::size_t neutral = 0;
  for (const auto& r : parsed.records) {
    const auto label = binarize_label(r.student_star.value());
    if (!label) {
      ++neutral;
      continue;
    }
    examples.push_back({r.row, prep(r.comment), r.comment, *label});
  }
  if (examples.empty()) throw DomainError(cfg.data.string() + ": no labeled examples");

  const auto parts = split(examples, cfg.split_fraction, cfg.seed);
  std::vector<TokenSequence> corpus;
  for (const auto& x : parts.train) corpus.push_back(x.tokens);
  const auto full_vocab = build_vocabulary(corpus);
  const auto y_train = labels_of(parts.train);
  const auto scores = chi2_scores(presence_sets(full_vocab, corpus), full_vocab.size(), y_train);
  const TfidfModel tfidf(select_top_k(scores, full_vocab, cfg.k));

  fs::create_directories(cfg.out);

  ojson ex;
  ex["version"] = 1;
  ex["examples"] = ojson::array();
  for (const auto* part : {&parts.train, &parts.test}) {
    const char* name = part == &parts.train ? "train" : "test";
    for (const auto& x : *part) {
      ex["examples"].push_back({{"id", x.id},
                                {"split", name},
                                {"label", to_string(x.label)},
                                {"tokens", x.tokens},
                                {"comment", x.raw_comment}});
    }
  }
  write_text_file(cfg.out / bundle_files::kExamples, ex.dump() + "\n");

  auto vj = ojson::parse(tfidf.to_json());
  vj["hash"] = tfidf.vocab().hash();
  vj["k"] = cfg.k;
  vj["candidates"] = full_vocab.size();
  vj["textprep"] = {{"stopwords", path_or_builtin(cfg.stopwords)},
                    {"lemma_rules", path_or_builtin(cfg.lemma_rules)},
                    {"n_stopwords", prep.stopwords().words.size()},
                    {"n_suffix_rules", prep.rules().suffix_rules.size()},
                    {"n_exceptions", prep.rules().exceptions.size()}};
  write_text_file(cfg.out / bundle_files::kVocab, vj.dump(1) + "\n");

  write_text_file(cfg.out / bundle_files::kChi2, chi2_report_csv(scores, full_vocab));

  ojson sj;
  sj["version"] = 1;
  sj["seed"] = cfg.seed;
  sj["fraction"] = cfg.split_fraction;
  sj["n_train"] = parts.train.size();
  sj["n_test"] = parts.test.size();
  sj["train"] = ojson::array();
  for (const auto& x : parts.train) sj["train"].push_back(x.id);
  sj["test"] = ojson::array();
  for (const auto& x : parts.test) sj["test"].push_back(x.id);
  sj["warnings"] = parts.warnings;
  write_text_file(cfg.out / bundle_files::kSplit, sj.dump() + "\n");

  const auto before = count_classes(y_train);
  const auto top = std::max(before.positive, before.negative);
  auto bj = ojson::parse(balance_report_json(before, {top, top}, {cfg.smote_k, cfg.seed}));
  if (before.positive > 0 && before.negative > 0) {
    const auto w = class_weights(y_train);
    bj["rnn_class_weights"] = {{"positive", w.positive}, {"negative", w.negative}};
  }
  write_text_file(cfg.out / bundle_files::kBalance, bj.dump(1) + "\n");

  auto dj = ojson::parse(parsed.drops.to_json());
  dj["neutral_excluded"] = neutral;
  dj["labeled"] = examples.size();
  write_text_file(cfg.out / bundle_files::kDrops, dj.dump(1) + "\n");

  return {examples.size(), parts.train.size(), parts.test.size(), tfidf.dim(), parsed.drops};
}

fs::path cmd_train(const PipelineConfig& cfg, const std::string& kind,
                   const std::optional<fs::path>& model_out) {
  cfg.validate();
  if (kind != "logreg" && kind != "rnn") throw DomainError("unknown model kind '" + kind + "'");
  const auto b = Bundle::load(cfg.out);
  const auto path = model_out.value_or(default_model_path(cfg, kind));
  const auto log_path = path.parent_path() / (path.stem().string() + "-log.csv");
  std::ostringstream log;

  if (kind == "logreg") {
    std::vector<SparseVector> x;
    for (const auto& e : b.train) x.push_back(b.tfidf.transform(e.tokens));
    const auto balanced = balance_to_parity(x, labels_of(b.train), {cfg.smote_k, cfg.seed});
    auto lcfg = cfg.lr;
    lcfg.seed = cfg.seed;
    const auto r = train_lr(balanced.x, balanced.y, b.tfidf.dim(), lcfg);
    log << "epoch,loss,learning_rate\n0," << format_double(r.initial_loss) << ','
        << format_double(lcfg.learning_rate) << '\n';
    for (const auto& e : r.log) {
      log << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.learning_rate) << '\n';
    }
    write_text_file(path, r.model.to_json(b.vocab_hash));
  } else {
    const auto inner = split(b.train, 1.0 - cfg.valid_fraction, cfg.seed);
    auto encode_all = [&](const std::vector<LabeledExample>& xs) {
      std::vector<EncodedExample> out;
      for (const auto& e : xs) out.push_back({encode(b.tfidf.vocab(), e.tokens, cfg.rnn.dims.max_len), e.label});
      return out;
    };
    auto ncfg = cfg.rnn;
    ncfg.seed = cfg.seed;
    ncfg.class_weights = class_weights(labels_of(inner.train));
    const auto r = train_rnn(encode_all(inner.train), encode_all(inner.test), b.tfidf.dim(), ncfg);
    log << "epoch,train_loss,valid_loss,valid_f1,valid_accuracy\n";
    log << "0," << format_double(r.initial_loss) << ",,,\n";
    for (const auto& e : r.log) {
      log << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.valid_loss) << ','
          << format_double(e.valid_f1) << ',' << format_double(e.valid_accuracy) << '\n';
    }
    write_text_file(path, r.model.to_json(b.vocab_hash));
  }
  write_text_file(log_path, log.str());
  return path;
}

EvalReport cmd_evaluate(const PipelineConfig& cfg, const fs::path& model_path) {
  cfg.validate();
  const auto b = Bundle::load(cfg.out);
  const auto m = ScoringModel::load(model_path);
  m.check_vocab(b);
  std::vector<double> p;
  for (const auto& e : b.test) p.push_back(m.score(e.tokens, b.tfidf));
  const auto labels = labels_of(b.test);
  auto report = evaluate_scores(p, labels, m.kind, cfg.threshold);
  write_text_file(cfg.out / ("report-" + m.kind + ".json"), report.to_json());
  if (cfg.plots) {
    const auto name = m.kind == "rnn" ? std::string("RNN") : std::string("LR");
    write_text_file(cfg.out / ("roc-" + m.kind + ".svg"), roc_svg(report.roc, name + " ROC"));
    write_text_file(cfg.out / ("confusion-" + m.kind + ".svg"),
                    confusion_svg(report.confusion, name + " confusion matrix"));
  }
  return report;
}

std::string Prediction::to_json() const {
  ojson j;
  j["label"] = to_string(label);
  j["p_positive"] = p_positive;
  j["flags"] = ojson::array();
  if (low_signal) j["flags"].push_back("low-signal input");
  return j.dump();
}

Prediction cmd_predict(const PipelineConfig& cfg, const fs::path& model_path, const std::string& text) {
  cfg.validate();
  const auto b = Bundle::load(cfg.out);
  const auto m = ScoringModel::load(model_path);
  m.check_vocab(b);
  const auto tokens = b.preprocessor()(text);
  Prediction out;
  out.p_positive = m.score(tokens, b.tfidf);
  out.label = classify(out.p_positive, cfg.threshold);
  out.low_signal = m.low_signal(tokens, b.tfidf);
  return out;
}

std::vector<std::string> default_sensitivity_sentences() {
  return {
      "The lecture was engaging and informative.",
      "Incredibly lecture but too long material.",
      "The lecture was conducted today.",
      "The lecture was extremely engaging and incredibly informative.",
      "The lecture was not engaging but informative.",
      "The course material was engaging and informative.",
      "The lecture was informative but too long and tiring.",
      "The lecture was not engaging and informative.",
  };
}

std::vector<std::string> read_sentences(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (!t.empty()) out.push_back(std::move(t));
  }
  if (out.empty()) throw DomainError(path.string() + ": no sentences");
  return out;
}

std::string sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::ostringstream os;
  os << "id,text,lr_p_positive,rnn_p_positive\n";
  for (const auto& r : rows) {
    os << r.id << ',' << csv_quote(r.text) << ',' << format_double(r.lr_p_positive) << ','
       << format_double(r.rnn_p_positive) << '\n';
  }
  return os.str();
}

std::vector<SensitivityRow> cmd_sensitivity(const PipelineConfig& cfg, const fs::path& lr_model,
                                            const fs::path& rnn_model,
                                            const std::optional<fs::path>& sentences) {
  cfg.validate();
  const auto b = Bundle::load(cfg.out);
  const auto lr = ScoringModel::load(lr_model);
  const auto rnn = ScoringModel::load(rnn_model);
  if (lr.kind != "logreg") throw DomainError(lr_model.string() + " is not a logreg model");
  if (rnn.kind != "rnn") throw DomainError(rnn_model.string() + " is not an rnn model");
  lr.check_vocab(b);
  rnn.check_vocab(b);
  const auto texts = sentences ? read_sentences(*sentences) : default_sensitivity_sentences();
  const auto prep = b.preprocessor();
  std::vector<SensitivityRow> rows;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto tokens = prep(texts[i]);
    rows.push_back({i + 1, texts[i], lr.score(tokens, b.tfidf), rnn.score(tokens, b.tfidf)});
  }
  write_text_file(cfg.out / "sensitivity.csv", sensitivity_csv(rows));
  if (cfg.plots) write_text_file(cfg.out / "sensitivity.svg", sensitivity_svg(rows));
  return rows;
}

std::string cmd_compare(const fs::path& baseline, const fs::path& candidate) {
  auto load = [](const fs::path& p) {
    try {
      return EvalReport::from_json(read_text_file(p));
    } catch (const IoError& e) {
      throw IoError(p.string() + ": " + e.what());
    }
  };
  const auto a = load(baseline), b = load(candidate);
  auto name = [](const EvalReport& r, const fs::path& p) {
    if (r.model_kind == "logreg") return std::string("LR");
    if (r.model_kind == "rnn") return std::string("RNN");
    return p.stem().string();
  };
  return format_comparison(compare_reports(a, b), name(a, baseline), name(b, candidate));
}

}  // namespace sentiment
