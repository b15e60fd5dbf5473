#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sentiment {

using TokenSequence = std::vector<std::string>;

/// Lowercases, splits on anything that is not an ASCII letter or an
/// apostrophe, trims apostrophes at token edges and drops tokens shorter
/// than two characters.
TokenSequence tokenize(std::string_view text);

struct StopwordList {
  std::set<std::string> words;
  std::string source = "builtin";

  static StopwordList builtin();
  static StopwordList from_file(const std::filesystem::path& path);
  /// One word per line, '#' comments and blank lines ignored.
  static StopwordList parse(std::string_view text, std::string source);

  bool contains(const std::string& w) const { return words.count(w) != 0; }
};

TokenSequence remove_stopwords(const TokenSequence& seq, const StopwordList& sw);

struct SuffixRule {
  std::string suffix;
  std::string replacement;  // literal; see kRepairStem
  std::size_t min_stem = 0;

  /// Replacement marker: strip the suffix, then undouble a doubled final
  /// consonant or restore a silent 'e'.
  static constexpr std::string_view kRepairStem = "*";
};

struct LemmaRuleTable {
  std::vector<SuffixRule> suffix_rules;
  std::map<std::string, std::string> exceptions;
  std::string source = "builtin";

  static LemmaRuleTable builtin();
  static LemmaRuleTable from_file(const std::filesystem::path& path);
  /// Three tab-separated fields form a suffix rule (suffix, replacement,
  /// min_stem; "-" means empty replacement); two fields form an exception.
  static LemmaRuleTable parse(std::string_view text, std::string source);

  /// Lemma of a single word. Rules are re-applied until the word is stable
  /// so the result is a fixed point of the table.
  std::string lemma(const std::string& word) const;
};

TokenSequence lemmatize(const TokenSequence& seq, const LemmaRuleTable& rules);

/// tokenize -> remove_stopwords -> lemmatize.
class Preprocessor {
 public:
  Preprocessor() : Preprocessor(StopwordList::builtin(), LemmaRuleTable::builtin()) {}
  Preprocessor(StopwordList stopwords, LemmaRuleTable rules)
      : stopwords_(std::move(stopwords)), rules_(std::move(rules)) {}

  TokenSequence operator()(std::string_view text) const {
    return lemmatize(remove_stopwords(tokenize(text), stopwords_), rules_);
  }

  const StopwordList& stopwords() const { return stopwords_; }
  const LemmaRuleTable& rules() const { return rules_; }

 private:
  StopwordList stopwords_;
  LemmaRuleTable rules_;
};

// Raw text of the shipped data files, compiled in.
std::string_view builtin_stopwords_text();
std::string_view builtin_lemma_rules_text();

}  // namespace sentiment
