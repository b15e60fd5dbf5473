#include "cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/pipeline.hpp"

namespace sentiment {

namespace {

struct GlobalFlags {
  std::string config, seed, data, out, k, smote_k, stopwords, lemma_rules, threshold;
  bool no_plots = false;
  std::vector<std::string> overrides;
};

PipelineConfig resolve(const CLI::App& app, const GlobalFlags& g) {
  PipelineConfig cfg;
  if (!g.config.empty()) cfg.load_file(g.config);
  const std::pair<const char*, const std::string*> flags[] = {
      {"seed", &g.seed},           {"data", &g.data},         {"out", &g.out},
      {"k", &g.k},                 {"smote-k", &g.smote_k},   {"stopwords", &g.stopwords},
      {"lemma-rules", &g.lemma_rules}, {"threshold", &g.threshold}};
  for (const auto& [flag, value] : flags) {
    if (app.count(std::string("--") + flag) == 0) continue;
    std::string key = flag;
    std::replace(key.begin(), key.end(), '-', '_');
    cfg.set(key, *value);
  }
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.no_plots) cfg.plots = false;
  return cfg;
}

fs::path model_path(const PipelineConfig& cfg, const std::string& model, const std::string& kind) {
  if (!model.empty()) return model;
  if (kind.empty()) throw DomainError("pass --model PATH or --kind logreg|rnn");
  return default_model_path(cfg, kind);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Student-feedback sentiment toolkit", "sentiment"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config, "Flat key = value configuration file");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--data", g.data, "Input CSV");
  app.add_option("--out", g.out, "Bundle directory (default: bundle)");
  app.add_option("--k", g.k, "Number of chi-squared features to keep");
  app.add_option("--smote-k", g.smote_k, "SMOTE neighbor count");
  app.add_option("--stopwords", g.stopwords, "Stopword list file");
  app.add_option("--lemma-rules", g.lemma_rules, "Lemma rule file");
  app.add_option("--threshold", g.threshold, "Decision threshold on p(Positive)");
  app.add_option("--set", g.overrides, "Override any configuration key (KEY=VALUE)");
  app.add_flag("--no-plots", g.no_plots, "Skip SVG output");

  auto* prepare = app.add_subcommand("prepare", "Clean, split and featurize a CSV into a bundle");

  std::string kind, model;
  auto* train = app.add_subcommand("train", "Train a model on the bundle's training split");
  train->add_option("--kind", kind, "logreg or rnn")->required()->check(CLI::IsMember({"logreg", "rnn"}));
  train->add_option("--model", model, "Output model path");

  auto* evaluate = app.add_subcommand("evaluate", "Score the held-out split");
  evaluate->add_option("--kind", kind, "Use the bundle's model of this kind")
      ->check(CLI::IsMember({"logreg", "rnn"}));
  evaluate->add_option("--model", model, "Model file");

  std::string text;
  auto* predict = app.add_subcommand("predict", "Classify one comment");
  predict->add_option("--kind", kind, "Use the bundle's model of this kind")
      ->check(CLI::IsMember({"logreg", "rnn"}));
  predict->add_option("--model", model, "Model file");
  predict->add_option("text", text, "Comment text")->required();

  std::string lr_model, rnn_model, sentences;
  auto* sensitivity = app.add_subcommand("sensitivity", "Score sentence variations with both models");
  sensitivity->add_option("--lr-model", lr_model, "Logistic regression model");
  sensitivity->add_option("--rnn-model", rnn_model, "RNN model");
  sensitivity->add_option("--sentences", sentences, "One sentence per line");

  std::string baseline, candidate;
  auto* compare = app.add_subcommand("compare", "Tabulate metric deltas between two reports");
  compare->add_option("baseline", baseline, "Baseline report JSON")->required();
  compare->add_option("candidate", candidate, "Candidate report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve(app, g);
    if (*prepare) {
      const auto s = cmd_prepare(cfg);
      out << "prepared " << s.n_examples << " examples (train " << s.n_train << ", test " << s.n_test << "), "
          << s.n_features << " features, " << s.drops.dropped() << " rows dropped -> " << cfg.out.string()
          << '\n';
    } else if (*train) {
      const auto path = cmd_train(cfg, kind, model.empty() ? std::nullopt : std::optional<fs::path>(model));
      out << "wrote " << path.string() << '\n';
    } else if (*evaluate) {
      out << cmd_evaluate(cfg, model_path(cfg, model, kind)).to_json();
    } else if (*predict) {
      out << cmd_predict(cfg, model_path(cfg, model, kind), text).to_json() << '\n';
    } else if (*sensitivity) {
      const auto rows = cmd_sensitivity(
          cfg, lr_model.empty() ? default_model_path(cfg, "logreg") : fs::path(lr_model),
          rnn_model.empty() ? default_model_path(cfg, "rnn") : fs::path(rnn_model),
          sentences.empty() ? std::nullopt : std::optional<fs::path>(sentences));
      out << sensitivity_csv(rows);
    } else if (*compare) {
      out << cmd_compare(baseline, candidate);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sentiment
