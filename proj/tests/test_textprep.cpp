#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "corpora.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/textprep.hpp"

using namespace sentiment;
using Seq = TokenSequence;

#ifndef SENTIMENT_DATA_DIR
#error "SENTIMENT_DATA_DIR must be defined"
#endif

TEST_CASE("tokenize") {
  CHECK(tokenize("The lecture was engaging and informative.") ==
        Seq{"the", "lecture", "was", "engaging", "and", "informative"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("A+ prof!!") == Seq{"prof"});
  CHECK(tokenize("Don't STOP 'quoted' students' x") == Seq{"don't", "stop", "quoted", "students"});
  CHECK(tokenize("naïve café") == Seq{"na", "ve", "caf"});
}

TEST_CASE("tokenize output shape") {
  const std::regex shape("[a-z][a-z']*");
  for (const auto& s : corpora::toy_templates()) {
    const auto toks = tokenize(s.text);
    CHECK(toks.size() <= s.text.size());
    for (const auto& t : toks) {
      CHECK(std::regex_match(t, shape));
      CHECK(t.size() >= 2);
    }
  }
}

TEST_CASE("builtin stopword list") {
  const auto sw = StopwordList::builtin();
  CHECK(sw.source == "builtin");
  CHECK(sw.words.size() >= 150);
  for (const char* w : {"the", "an", "in", "and", "was"}) CHECK(sw.contains(w));
  for (const char* w : {"not", "no", "nor", "don't", "isn't", "never"}) CHECK_FALSE(sw.contains(w));
}

TEST_CASE("remove_stopwords") {
  const auto sw = StopwordList::builtin();
  CHECK(remove_stopwords({"the", "lecture", "was", "engaging", "and", "informative"}, sw) ==
        Seq{"lecture", "engaging", "informative"});
  CHECK(remove_stopwords({}, sw).empty());
  const Seq plain{"lecture", "exam", "grade"};
  CHECK(remove_stopwords(plain, sw) == plain);
}

TEST_CASE("stopword file parsing") {
  const auto sw = StopwordList::parse("# comment\nfoo\n\nbar\r\n", "mem");
  CHECK(sw.words == std::set<std::string>{"foo", "bar"});
  CHECK_THROWS_AS(StopwordList::parse("# only comments\n", "mem"), DomainError);
  CHECK_THROWS_AS(StopwordList::parse("Upper\n", "mem"), DomainError);
  CHECK_THROWS_AS(StopwordList::from_file("/nonexistent/stopwords.txt"), IoError);
}

TEST_CASE("lemmatize examples") {
  const auto rules = LemmaRuleTable::builtin();
  CHECK(lemmatize({"grading"}, rules) == Seq{"grade"});
  CHECK(lemmatize({"interesting"}, rules) == Seq{"interest"});
  CHECK(lemmatize({"exam"}, rules) == Seq{"exam"});
}

TEST_CASE("lemmatize rule coverage") {
  const auto rules = LemmaRuleTable::builtin();
  struct Case {
    const char* in;
    const char* out;
  };
  for (auto [in, out] : std::initializer_list<Case>{{"studies", "study"},
                                                    {"classes", "class"},
                                                    {"lectures", "lecture"},
                                                    {"engaging", "engage"},
                                                    {"tiring", "tire"},
                                                    {"stopped", "stop"},
                                                    {"needed", "need"},
                                                    {"teaches", "teach"},
                                                    {"professor's", "professor"},
                                                    {"focus", "focus"},
                                                    {"analysis", "analysis"},
                                                    {"was", "be"},
                                                    {"taught", "teach"},
                                                    {"don't", "not"},
                                                    {"isn't", "not"},
                                                    {"feelings", "feel"},
                                                    {"things", "thing"},
                                                    {"bus", "bus"}}) {
    CAPTURE(in);
    CHECK(rules.lemma(in) == out);
  }
}

TEST_CASE("lemmatize preserves length and is idempotent") {
  const auto rules = LemmaRuleTable::builtin();
  Seq words;
  for (const auto& [w, l] : rules.exceptions) {
    words.push_back(w);
    words.push_back(l);
  }
  for (const auto& s : corpora::toy_templates()) {
    for (auto& t : tokenize(s.text)) words.push_back(t);
  }
  for (const char* w : {"running", "hopping", "organized", "relating", "giving", "amazing",
                        "introducing", "boxes", "wishes", "agreed", "hoping", "pass", "passes"}) {
    words.push_back(w);
  }
  const auto once = lemmatize(words, rules);
  CHECK(once.size() == words.size());
  CHECK(lemmatize(once, rules) == once);
}

TEST_CASE("remove_stopwords is idempotent") {
  const auto sw = StopwordList::builtin();
  for (const auto& s : corpora::toy_templates()) {
    const auto once = remove_stopwords(tokenize(s.text), sw);
    CHECK(remove_stopwords(once, sw) == once);
  }
}

TEST_CASE("min stem length is honored") {
  const auto rules = LemmaRuleTable::parse("ing\t-\t3\ns\t-\t3\n", "mem");
  CHECK(rules.lemma("king") == "king");
  CHECK(rules.lemma("walking") == "walk");
  CHECK(rules.lemma("gas") == "gas");
  CHECK(rules.lemma("cats") == "cat");
}

TEST_CASE("exceptions win over rules") {
  const auto rules = LemmaRuleTable::parse("s\t-\t1\nnews\tnews\n", "mem");
  CHECK(rules.lemma("news") == "news");
  CHECK(rules.lemma("views") == "view");
}

TEST_CASE("lemma rule file errors") {
  CHECK_THROWS_AS(LemmaRuleTable::parse("a\tb\tc\td\n", "mem"), DomainError);
  CHECK_THROWS_AS(LemmaRuleTable::parse("ing\t-\tthree\n", "mem"), DomainError);
  CHECK_THROWS_AS(LemmaRuleTable::from_file("/nonexistent/rules.tsv"), IoError);
}

TEST_CASE("shipped data files match the compiled-in builtins") {
  const std::filesystem::path dir = SENTIMENT_DATA_DIR;
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(read(dir / "stopwords.txt") == builtin_stopwords_text());
  CHECK(read(dir / "lemma_rules.txt") == builtin_lemma_rules_text());
  CHECK(StopwordList::from_file(dir / "stopwords.txt").words == StopwordList::builtin().words);
}

TEST_CASE("pipeline on the first sensitivity sentence") {
  const Preprocessor prep;
  CHECK(prep("The lecture was engaging and informative.") ==
        Seq{"lecture", "engage", "informative"});
  CHECK(prep("The lecture was not engaging but informative.") ==
        Seq{"lecture", "not", "engage", "informative"});
  CHECK(prep("I don't like it") == Seq{"not", "like"});
}

TEST_CASE("pipeline is deterministic") {
  const Preprocessor a, b;
  for (const auto& s : corpora::toy_templates()) CHECK(a(s.text) == b(s.text));
}
