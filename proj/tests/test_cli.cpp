#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "corpora.hpp"
#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/pipeline.hpp"

using namespace sentiment;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sentiment");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sentiment-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

/// Toy templates repeated three times, plus neutral rows and rows without a
/// comment.
fs::path write_toy_csv(const fs::path& dir, std::size_t missing_comments = 7) {
  const auto path = dir / "toy.csv";
  std::ofstream f(path);
  f << "professor_name,comments,student_star,star_rating\n";
  std::size_t n = 0;
  for (int rep = 0; rep < 3; ++rep) {
    for (const auto& s : corpora::toy_templates()) {
      f << "prof" << n++ % 5 << ',' << csv_field(s.text) << ','
        << (s.label == SentimentLabel::Positive ? "4.5" : "1.5") << ",3\n";
    }
  }
  for (int i = 0; i < 4; ++i) f << "prof0,\"It was a class.\",3.0,3\n";
  for (std::size_t i = 0; i < missing_comments; ++i) f << "prof1,,5,5\n";
  return path;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

}  // namespace

TEST_CASE("configuration precedence and errors") {
  const auto dir = scratch("config");
  write_text_file(dir / "run.toml",
                  "# comment\nk = 50\nseed = 9\n\n[rnn]\nepochs = 3\nhidden = 8\n[lr]\nl2 = 0.5\n");
  PipelineConfig cfg;
  CHECK(cfg.k == 5000);
  CHECK(cfg.split_fraction == 0.8);
  cfg.load_file(dir / "run.toml");
  CHECK(cfg.k == 50);
  CHECK(cfg.seed == 9);
  CHECK(cfg.rnn.epochs == 3);
  CHECK(cfg.rnn.dims.hidden == 8);
  CHECK(cfg.lr.l2 == 0.5);

  write_text_file(dir / "bad.toml", "k = 5\nnot_a_key = 1\n");
  CHECK_THROWS_WITH_AS(PipelineConfig{}.load_file(dir / "bad.toml"),
                       doctest::Contains("bad.toml:2"), SchemaError);
  CHECK_THROWS_AS(PipelineConfig{}.set("k", "many"), DomainError);
  PipelineConfig frac;
  frac.split_fraction = 1.0;
  CHECK_THROWS_AS(frac.validate(), DomainError);

  // flag beats file beats default
  const auto csv = write_toy_csv(dir);
  write_text_file(dir / "k.toml", "k = 7\nsplit_fraction = 0.75\n");
  auto r = cli({"prepare", "--config", (dir / "k.toml").string(), "--k", "5", "--data", csv.string(), "--out",
                (dir / "b").string()});
  REQUIRE(r.code == 0);
  const auto vocab = json::parse(slurp(dir / "b" / "vocab.json"));
  CHECK(vocab["terms"].size() == 5);
  CHECK(json::parse(slurp(dir / "b" / "split.json"))["fraction"] == 0.75);

  CHECK(cli({"prepare", "--config", (dir / "bad.toml").string(), "--data", csv.string()}).code == 2);
  CHECK(cli({"prepare", "--k", "0", "--data", csv.string(), "--out", (dir / "c").string()}).code == 1);
  CHECK(cli({"prepare", "--set", "split_fraction=2", "--data", csv.string()}).code == 1);
}

TEST_CASE("prepare writes a deterministic six-file bundle") {
  const auto dir = scratch("prepare");
  const auto csv = write_toy_csv(dir);
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", a.string(), "--seed", "3"}).code == 0);
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", b.string(), "--seed", "3"}).code == 0);
  const char* files[] = {bundle_files::kExamples, bundle_files::kVocab,   bundle_files::kChi2,
                         bundle_files::kSplit,    bundle_files::kBalance, bundle_files::kDrops};
  std::size_t n_files = 0;
  for (const auto& e : fs::directory_iterator(a)) n_files += e.is_regular_file();
  CHECK(n_files == 6);
  for (const char* f : files) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto split = json::parse(slurp(a / bundle_files::kSplit));
  CHECK(split["n_train"].get<int>() + split["n_test"].get<int>() == 60);
  CHECK(split["n_train"] == 48);

  const auto c = dir / "c";
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", c.string(), "--seed", "4"}).code == 0);
  CHECK(slurp(a / bundle_files::kSplit) != slurp(c / bundle_files::kSplit));
}

TEST_CASE("drop report counts the missing comments") {
  const auto dir = scratch("drops");
  const auto csv = write_toy_csv(dir, 7);
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", (dir / "b").string()}).code == 0);
  const auto drops = json::parse(slurp(dir / "b" / bundle_files::kDrops));
  CHECK(drops["missing_comment"] == 7);
  CHECK(drops["neutral_excluded"] == 4);
  CHECK(drops["labeled"] == 60);
}

TEST_CASE("io and schema failures exit with 2") {
  const auto dir = scratch("io");
  auto r = cli({"train", "--kind", "logreg", "--out", (dir / "missing").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find((dir / "missing").string()) != std::string::npos);

  r = cli({"prepare", "--data", (dir / "none.csv").string(), "--out", (dir / "b").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("none.csv") != std::string::npos);

  write_text_file(dir / "nocol.csv", "comments,rating\nhello,5\n");
  r = cli({"prepare", "--data", (dir / "nocol.csv").string(), "--out", (dir / "b").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("student_star") != std::string::npos);

  write_text_file(dir / "quote.csv", "comments,student_star\n\"open,5\n");
  r = cli({"prepare", "--data", (dir / "quote.csv").string(), "--out", (dir / "b").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"train", "--kind", "forest"}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("train, evaluate, predict, sensitivity and compare") {
  const auto dir = scratch("flow");
  const auto csv = write_toy_csv(dir);
  const auto b = dir / "b";
  const auto out = b.string();
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", out, "--seed", "11"}).code == 0);

  REQUIRE(cli({"train", "--kind", "logreg", "--out", out, "--seed", "11"}).code == 0);
  REQUIRE(fs::exists(b / "model-logreg.json"));
  {
    std::istringstream log(slurp(b / "model-logreg-log.csv"));
    std::string line;
    std::getline(log, line);
    CHECK(line == "epoch,loss,learning_rate");
    double prev = 1e300;
    std::size_t rows = 0;
    while (std::getline(log, line)) {
      const double loss = std::stod(line.substr(line.find(',') + 1));
      CHECK(loss <= prev + 1e-9);
      prev = loss;
      ++rows;
    }
    CHECK(rows == 201);
  }

  const std::vector<std::string> rnn_args = {"train",       "--kind", "rnn",         "--out",
                                             out,           "--seed", "11",          "--set",
                                             "rnn.epochs=4", "--set", "rnn.hidden=8", "--set",
                                             "rnn.embed_dim=8", "--set", "rnn.attn_dim=8"};
  auto args = rnn_args;
  REQUIRE(cli(args).code == 0);
  const auto first = slurp(b / "model-rnn.json");
  args.insert(args.end(), {"--model", (dir / "again.json").string()});
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(dir / "again.json") == first);
  CHECK(slurp(dir / "again-log.csv") == slurp(b / "model-rnn-log.csv"));

  auto r = cli({"evaluate", "--kind", "logreg", "--out", out});
  REQUIRE(r.code == 0);
  const auto report = json::parse(slurp(b / "report-logreg.json"));
  CHECK(report["metrics"]["accuracy"] == 1.0);
  CHECK(report["n_examples"] == 12);
  CHECK(fs::exists(b / "roc-logreg.svg"));
  CHECK(fs::exists(b / "confusion-logreg.svg"));
  REQUIRE(cli({"evaluate", "--model", (b / "model-rnn.json").string(), "--out", out, "--no-plots"}).code == 0);
  CHECK(fs::exists(b / "report-rnn.json"));
  CHECK_FALSE(fs::exists(b / "roc-rnn.svg"));

  r = cli({"predict", "--kind", "logreg", "--out", out, "The lecture was engaging and informative."});
  REQUIRE(r.code == 0);
  const auto p = json::parse(r.out);
  CHECK(p["label"] == "Positive");
  CHECK(p["flags"].empty());
  CHECK(cli({"predict", "--kind", "logreg", "--out", out, "The lecture was engaging and informative."}).out ==
        r.out);
  r = cli({"predict", "--kind", "rnn", "--out", out, ""});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["flags"][0] == "low-signal input");
  CHECK(cli({"predict", "--out", out, "text"}).code == 1);

  r = cli({"sensitivity", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 9);
  CHECK(slurp(b / "sensitivity.csv") == r.out);
  const auto svg = slurp(b / "sensitivity.svg");
  std::size_t rects = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) ++rects;
  CHECK(rects == 2 * 8 + 2);

  write_text_file(dir / "one.txt", "\nThe lecture was conducted today.\n\n");
  r = cli({"sensitivity", "--out", out, "--sentences", (dir / "one.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);
  CHECK(r.out.find("1,The lecture was conducted today.,") != std::string::npos);
  CHECK(cli({"sensitivity", "--out", out, "--lr-model", (b / "model-rnn.json").string()}).code == 1);

  r = cli({"compare", (b / "report-logreg.json").string(), (b / "report-rnn.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("| metric | LR | RNN | delta |") != std::string::npos);
  CHECK(r.out.find("| auc |") != std::string::npos);
  CHECK(cli({"compare", (b / "report-logreg.json").string(), (dir / "none.json").string()}).code == 2);

  // A model fitted on another vocabulary is refused.
  const auto other = dir / "other";
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", other.string(), "--k", "6"}).code == 0);
  r = cli({"evaluate", "--model", (b / "model-logreg.json").string(), "--out", other.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("vocabulary hash mismatch") != std::string::npos);
}

TEST_CASE("empty test split") {
  const auto dir = scratch("empty");
  const auto csv = write_toy_csv(dir, 0);
  const auto out = (dir / "b").string();
  REQUIRE(cli({"prepare", "--data", csv.string(), "--out", out, "--set", "split_fraction=0.999"}).code == 0);
  REQUIRE(cli({"train", "--kind", "logreg", "--out", out}).code == 0);
  const auto r = cli({"evaluate", "--kind", "logreg", "--out", out});
  CHECK(r.code == 1);
  CHECK(r.err.find("empty evaluation set") != std::string::npos);
}

TEST_CASE("svg structure") {
  RocCurve c;
  c.points = {{0, 0}, {0.25, 0.5}, {0.5, 0.75}, {1, 1}};
  c.auc = 0.6875;
  const auto roc = roc_svg(c, "LR ROC");
  CHECK(roc.rfind("<svg", 0) == 0);
  CHECK(roc.find("AUC = 0.6875") != std::string::npos);
  const auto pts = roc.find("points=\"");
  REQUIRE(pts != std::string::npos);
  const auto list = roc.substr(pts + 8, roc.find('"', pts + 8) - pts - 8);
  CHECK(std::count(list.begin(), list.end(), ',') == 4);

  const auto cm = confusion_svg({3, 1, 2, 4}, "a < b");
  CHECK(cm.find("a &lt; b") != std::string::npos);
  std::size_t rects = 0;
  for (auto pos = cm.find("<rect"); pos != std::string::npos; pos = cm.find("<rect", pos + 1)) ++rects;
  CHECK(rects == 4);
  CHECK(cm.find(">3</text>") != std::string::npos);
}
