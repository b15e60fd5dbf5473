#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentiment {

enum class SentimentLabel : std::uint8_t { Negative = 0, Positive = 1 };

std::string_view to_string(SentimentLabel label);

/// One retained dataset row. Ratings are absent when the column is not
/// mapped or the cell is blank; present ratings lie in [1, 5].
struct FeedbackRecord {
  std::size_t row = 0;  // 1-based data row index (header excluded)
  std::string comment;
  std::optional<double> student_star;
  std::optional<double> star_rating;
  std::optional<double> diff_index;
  std::optional<double> student_difficult;
  std::map<std::string, std::string> extra;
};

/// Logical field name -> CSV column name. Defaults follow the
/// RateMyProfessor dump headers.
struct ColumnSchema {
  std::string comment = "comments";
  std::string student_star = "student_star";
  std::string star_rating = "star_rating";
  std::string diff_index = "diff_index";
  std::string student_difficult = "student_difficult";

  /// Applies overrides keyed by logical field name ("comments",
  /// "student_star", ...). Unknown keys raise DomainError.
  void apply(const std::map<std::string, std::string>& overrides);
};

struct DropEntry {
  std::size_t row = 0;
  std::string reason;
};

struct DropReport {
  std::size_t rows_read = 0;
  std::size_t missing_comment = 0;
  std::size_t unparsable_rating = 0;
  std::size_t out_of_range_rating = 0;
  std::vector<DropEntry> entries;

  std::size_t dropped() const { return entries.size(); }
  std::string to_json() const;
};

struct ParseResult {
  std::vector<FeedbackRecord> records;
  DropReport drops;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
/// Returns every row including the header; blank lines are skipped.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in);

/// Parses a header-bearing CSV stream. The comment and student_star columns
/// are mandatory; a missing one raises SchemaError naming the column.
ParseResult parse_csv(std::istream& in, const ColumnSchema& schema = {});

/// >= 3.5 Positive, <= 2.4 Negative, neutral band in between -> nullopt.
/// Ratings outside [1, 5] raise DomainError.
std::optional<SentimentLabel> binarize_label(double student_star);

struct LabeledExample {
  std::size_t id = 0;  // source row, stable across runs
  std::vector<std::string> tokens;
  std::string raw_comment;
  SentimentLabel label = SentimentLabel::Negative;
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
  double fraction = 0.8;
  std::vector<std::string> warnings;
};

/// Number of training examples for N inputs: floor(fraction * N + 0.5).
std::size_t train_size(std::size_t n, double fraction);

/// Stratified, seeded split. The overall training size is train_size(N);
/// per-class quotas use largest remainders so each class is within one
/// example of its exact proportion. Output keeps input order within each
/// side.
DatasetSplit split(const std::vector<LabeledExample>& examples, double fraction,
                   std::uint64_t seed);

}  // namespace sentiment
