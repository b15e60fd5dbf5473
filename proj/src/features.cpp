#include "sentiment/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "sentiment/errors.hpp"

namespace sentiment {

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight;
  return std::sqrt(s);
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (const auto& e : entries) {
    if (e.index >= dense.size()) throw DomainError("sparse index exceeds dense dimension");
    s += e.weight * dense[e.index];
  }
  return s;
}

std::vector<double> SparseVector::to_dense(std::size_t dim) const {
  std::vector<double> out(dim, 0.0);
  for (const auto& e : entries) {
    if (e.index >= dim) throw DomainError("sparse index exceeds dense dimension");
    out[e.index] = e.weight;
  }
  return out;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) v.entries.push_back({i, dense[i]});
  }
  return v;
}

std::size_t Vocabulary::add(std::string term, std::size_t doc_freq) {
  if (index_.count(term)) throw DomainError("duplicate vocabulary term '" + term + "'");
  const auto idx = terms_.size();
  index_.emplace(term, idx);
  terms_.push_back(std::move(term));
  doc_freq_.push_back(doc_freq);
  return idx;
}

std::ptrdiff_t Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::string Vocabulary::hash() const {
  // FNV-1a 64 over newline-terminated terms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : terms_) {
    for (unsigned char c : t) mix(c);
    mix('\n');
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& corpus) {
  Vocabulary vocab;
  std::unordered_map<std::string, std::size_t> idx;
  std::vector<std::string> order;
  std::vector<std::size_t> df;
  std::vector<std::size_t> last_doc;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& tok : corpus[d]) {
      auto [it, inserted] = idx.emplace(tok, order.size());
      if (inserted) {
        order.push_back(tok);
        df.push_back(1);
        last_doc.push_back(d + 1);
      } else if (last_doc[it->second] != d + 1) {
        last_doc[it->second] = d + 1;
        ++df[it->second];
      }
    }
  }
  if (order.empty()) throw DomainError("empty vocabulary");
  for (std::size_t i = 0; i < order.size(); ++i) vocab.add(std::move(order[i]), df[i]);
  vocab.set_n_docs(corpus.size());
  return vocab;
}

TfidfModel::TfidfModel(Vocabulary vocab) : vocab_(std::move(vocab)) {
  idf_.reserve(vocab_.size());
  const double n = static_cast<double>(vocab_.n_docs());
  for (auto df : vocab_.doc_freq()) {
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
}

TfidfModel::TfidfModel(Vocabulary vocab, std::vector<double> idf)
    : vocab_(std::move(vocab)), idf_(std::move(idf)) {
  if (idf_.size() != vocab_.size()) throw DomainError("idf table does not match vocabulary");
}

SparseVector TfidfModel::transform(const TokenSequence& doc) const {
  std::vector<std::size_t> ids;
  ids.reserve(doc.size());
  for (const auto& tok : doc) {
    auto i = vocab_.find(tok);
    if (i >= 0) ids.push_back(static_cast<std::size_t>(i));
  }
  std::sort(ids.begin(), ids.end());
  SparseVector v;
  for (std::size_t k = 0; k < ids.size();) {
    std::size_t j = k;
    while (j < ids.size() && ids[j] == ids[k]) ++j;
    v.entries.push_back({ids[k], static_cast<double>(j - k) * idf_[ids[k]]});
    k = j;
  }
  const double n = v.norm();
  if (n > 0.0) {
    for (auto& e : v.entries) e.weight /= n;
  }
  return v;
}

std::string TfidfModel::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["terms"] = vocab_.terms();
  j["df"] = vocab_.doc_freq();
  j["idf"] = idf_;
  j["n_docs"] = vocab_.n_docs();
  return j.dump() + "\n";
}

TfidfModel TfidfModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("vocabulary file is not valid JSON: ") + e.what());
  }
  if (j.value("version", 0) != 1) throw IoError("unsupported vocabulary file version");
  try {
    const auto terms = j.at("terms").get<std::vector<std::string>>();
    const auto df = j.at("df").get<std::vector<std::size_t>>();
    auto idf = j.at("idf").get<std::vector<double>>();
    if (terms.size() != df.size()) throw IoError("vocabulary terms/df length mismatch");
    Vocabulary vocab;
    for (std::size_t i = 0; i < terms.size(); ++i) vocab.add(terms[i], df[i]);
    vocab.set_n_docs(j.at("n_docs").get<std::size_t>());
    return TfidfModel(std::move(vocab), std::move(idf));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed vocabulary file: ") + e.what());
  }
}

double chi2_statistic(double a, double b, double c, double d) {
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) return 0.0;
  const double n = r1 + r2;
  const double diff = a * d - b * c;
  return n * diff * diff / (r1 * r2 * c1 * c2);
}

PresenceSets presence_sets(const Vocabulary& vocab, const std::vector<TokenSequence>& corpus) {
  PresenceSets out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::vector<std::size_t> ids;
    for (const auto& tok : doc) {
      auto i = vocab.find(tok);
      if (i >= 0) ids.push_back(static_cast<std::size_t>(i));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out.push_back(std::move(ids));
  }
  return out;
}

std::vector<double> chi2_scores(const PresenceSets& presence, std::size_t n_terms,
                                const std::vector<SentimentLabel>& labels) {
  if (presence.size() != labels.size() || labels.empty()) {
    throw DomainError("chi-squared needs one label per document and at least one document");
  }
  std::size_t n_pos = 0;
  for (auto l : labels) n_pos += l == SentimentLabel::Positive;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DomainError("chi-squared undefined for one class");

  std::vector<std::size_t> pos_present(n_terms, 0), neg_present(n_terms, 0);
  for (std::size_t d = 0; d < presence.size(); ++d) {
    auto& counts = labels[d] == SentimentLabel::Positive ? pos_present : neg_present;
    std::size_t prev = static_cast<std::size_t>(-1);
    for (auto t : presence[d]) {
      if (t >= n_terms) throw DomainError("term index out of range in presence set");
      if (t == prev) continue;
      ++counts[t];
      prev = t;
    }
  }
  std::vector<double> scores(n_terms);
  for (std::size_t t = 0; t < n_terms; ++t) {
    const double a = static_cast<double>(pos_present[t]);
    const double b = static_cast<double>(neg_present[t]);
    scores[t] = chi2_statistic(a, b, static_cast<double>(n_pos) - a, static_cast<double>(n_neg) - b);
  }
  return scores;
}

namespace {

std::vector<std::size_t> rank_terms(std::span<const double> scores, const Vocabulary& vocab) {
  if (scores.size() != vocab.size()) throw DomainError("score table does not match vocabulary");
  std::vector<std::size_t> order(vocab.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return vocab.term(x) < vocab.term(y);
  });
  return order;
}

}  // namespace

Vocabulary select_top_k(std::span<const double> scores, const Vocabulary& vocab, std::size_t k) {
  if (k == 0) throw DomainError("top-k selection needs k >= 1");
  const auto order = rank_terms(scores, vocab);
  Vocabulary out;
  for (std::size_t r = 0; r < std::min(k, order.size()); ++r) {
    out.add(vocab.term(order[r]), vocab.doc_freq()[order[r]]);
  }
  out.set_n_docs(vocab.n_docs());
  return out;
}

std::string chi2_report_csv(std::span<const double> scores, const Vocabulary& vocab) {
  std::ostringstream os;
  os.precision(17);
  os << "term,score\n";
  for (auto i : rank_terms(scores, vocab)) os << vocab.term(i) << ',' << scores[i] << '\n';
  return os.str();
}

}  // namespace sentiment
