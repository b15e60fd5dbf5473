#include "sentiment/textprep.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sentiment/errors.hpp"

namespace sentiment {

namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    fn(line, lineno);
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

bool is_vowel_at(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    case 'y':
      return i > 0 && !is_vowel_at(w, i - 1);
    default:
      return false;
  }
}

// Number of vowel-run/consonant-run pairs.
std::size_t measure(const std::string& w) {
  std::size_t m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

bool ends_cvc(const std::string& w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel_at(w, n - 3) && is_vowel_at(w, n - 2) && !is_vowel_at(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string repair_stem(std::string stem) {
  const auto n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel_at(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') {
      stem.pop_back();
      return stem;
    }
    return stem;
  }
  const bool consonant_at =
      n >= 3 && ends_with(stem, "at") && !is_vowel_at(stem, n - 3);
  if (consonant_at || ends_with(stem, "bl") || ends_with(stem, "iz") || ends_with(stem, "v") ||
      ends_with(stem, "ag") || ends_with(stem, "az") || ends_with(stem, "uc") ||
      (measure(stem) == 1 && ends_cvc(stem))) {
    stem.push_back('e');
  }
  return stem;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = cur.find_first_not_of('\'');
    std::size_t e = cur.find_last_not_of('\'');
    if (b != std::string::npos) {
      std::string tok = cur.substr(b, e - b + 1);
      if (tok.size() >= 2) out.push_back(std::move(tok));
    }
    cur.clear();
  };
  for (char c : text) {
    if (is_ascii_letter(c) || c == '\'') {
      cur.push_back(lower(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

StopwordList StopwordList::parse(std::string_view text, std::string source) {
  StopwordList sw;
  sw.source = std::move(source);
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    if (line.empty()) return;
    std::string w(line);
    for (char c : w) {
      if (lower(c) != c) {
        throw DomainError(sw.source + ":" + std::to_string(lineno) + ": stopword '" + w +
                          "' is not lowercase");
      }
    }
    sw.words.insert(std::move(w));
  });
  if (sw.words.empty()) throw DomainError(sw.source + ": stopword list is empty");
  return sw;
}

StopwordList StopwordList::builtin() { return parse(builtin_stopwords_text(), "builtin"); }

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

TokenSequence remove_stopwords(const TokenSequence& seq, const StopwordList& sw) {
  TokenSequence out;
  out.reserve(seq.size());
  for (const auto& t : seq) {
    if (!sw.contains(t)) out.push_back(t);
  }
  return out;
}

LemmaRuleTable LemmaRuleTable::parse(std::string_view text, std::string source) {
  LemmaRuleTable table;
  table.source = std::move(source);
  for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    const auto fields = split_tabs(line);
    auto where = [&] { return table.source + ":" + std::to_string(lineno) + ": "; };
    if (fields.size() == 2) {
      if (fields[0].empty() || fields[1].empty()) throw DomainError(where() + "empty exception field");
      table.exceptions.insert_or_assign(std::string(fields[0]), std::string(fields[1]));
    } else if (fields.size() == 3) {
      SuffixRule rule;
      rule.suffix = std::string(fields[0]);
      rule.replacement = fields[1] == "-" ? std::string() : std::string(fields[1]);
      const auto f = fields[2];
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), rule.min_stem);
      if (rule.suffix.empty() || ec != std::errc{} || p != f.data() + f.size()) {
        throw DomainError(where() + "malformed suffix rule");
      }
      table.suffix_rules.push_back(std::move(rule));
    } else {
      throw DomainError(where() + "expected 2 or 3 tab-separated fields");
    }
  });
  return table;
}

LemmaRuleTable LemmaRuleTable::builtin() { return parse(builtin_lemma_rules_text(), "builtin"); }

LemmaRuleTable LemmaRuleTable::from_file(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

std::string LemmaRuleTable::lemma(const std::string& word) const {
  std::string cur = word;
  // Every non-identity rule shortens the word, so this terminates; the
  // bound guards against cyclic exception tables.
  for (std::size_t iter = 0; iter < 16; ++iter) {
    std::string next = cur;
    if (auto it = exceptions.find(cur); it != exceptions.end()) {
      next = it->second;
    } else {
      for (const auto& rule : suffix_rules) {
        if (!ends_with(cur, rule.suffix)) continue;
        const auto stem_len = cur.size() - rule.suffix.size();
        if (stem_len < rule.min_stem) continue;
        std::string stem = cur.substr(0, stem_len);
        next = rule.replacement == SuffixRule::kRepairStem ? repair_stem(std::move(stem))
                                                           : stem + rule.replacement;
        break;
      }
    }
    if (next == cur) return cur;
    cur = std::move(next);
  }
  return cur;
}

TokenSequence lemmatize(const TokenSequence& seq, const LemmaRuleTable& rules) {
  TokenSequence out;
  out.reserve(seq.size());
  for (const auto& t : seq) out.push_back(rules.lemma(t));
  return out;
}

}  // namespace sentiment
