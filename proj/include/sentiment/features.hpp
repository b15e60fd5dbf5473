#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentiment/ingest.hpp"
#include "sentiment/textprep.hpp"

namespace sentiment {

struct SparseEntry {
  std::size_t index = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Indices strictly increasing, no stored zeros.
struct SparseVector {
  std::vector<SparseEntry> entries;

  bool empty() const { return entries.empty(); }
  double norm() const;
  double dot(std::span<const double> dense) const;
  /// One past the largest stored index (0 when empty).
  std::size_t extent() const { return entries.empty() ? 0 : entries.back().index + 1; }
  std::vector<double> to_dense(std::size_t dim) const;
  static SparseVector from_dense(std::span<const double> dense);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Adds a term with the given document frequency; returns its index.
  std::size_t add(std::string term, std::size_t doc_freq);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::string& term(std::size_t i) const { return terms_[i]; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  std::size_t n_docs() const { return n_docs_; }
  void set_n_docs(std::size_t n) { n_docs_ = n; }

  /// Index of a term, or -1 when out of vocabulary.
  std::ptrdiff_t find(const std::string& term) const;

  /// Stable content hash of the ordered term list (16 hex digits).
  std::string hash() const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_docs_ = 0;
};

/// Distinct corpus tokens in first-appearance order with document counts.
/// Raises DomainError("empty vocabulary") when no document has tokens.
Vocabulary build_vocabulary(const std::vector<TokenSequence>& corpus);

class TfidfModel {
 public:
  TfidfModel() = default;
  /// idf[t] = ln((1 + n_docs) / (1 + df[t])) + 1.
  explicit TfidfModel(Vocabulary vocab);
  TfidfModel(Vocabulary vocab, std::vector<double> idf);

  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<double>& idf() const { return idf_; }
  std::size_t dim() const { return vocab_.size(); }

  /// count(t) * idf[t], L2-normalized. OOV tokens are ignored; a doc with no
  /// in-vocabulary tokens yields the empty vector.
  SparseVector transform(const TokenSequence& doc) const;

  std::string to_json() const;
  static TfidfModel from_json(const std::string& text);

 private:
  Vocabulary vocab_;
  std::vector<double> idf_;
};

/// Closed-form 2x2 statistic N(ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d)); zero
/// when any marginal is zero. a/b: term present in Pos/Neg docs, c/d: absent.
double chi2_statistic(double a, double b, double c, double d);

/// Per-document set of present term indices.
using PresenceSets = std::vector<std::vector<std::size_t>>;

PresenceSets presence_sets(const Vocabulary& vocab, const std::vector<TokenSequence>& corpus);

/// Per-term chi-squared score of term presence against the label. Raises
/// DomainError when only one class is present.
std::vector<double> chi2_scores(const PresenceSets& presence, std::size_t n_terms,
                                const std::vector<SentimentLabel>& labels);

/// The k highest-scoring terms, ties by ascending term, re-indexed in rank
/// order. Document frequencies and n_docs are carried over.
Vocabulary select_top_k(std::span<const double> scores, const Vocabulary& vocab, std::size_t k);

/// "term,score" rows in descending score order.
std::string chi2_report_csv(std::span<const double> scores, const Vocabulary& vocab);

}  // namespace sentiment
