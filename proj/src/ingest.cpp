#include "sentiment/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/rng.hpp"

namespace sentiment {

std::string_view to_string(SentimentLabel label) {
  return label == SentimentLabel::Positive ? "Positive" : "Negative";
}

void ColumnSchema::apply(const std::map<std::string, std::string>& overrides) {
  for (const auto& [field, column] : overrides) {
    if (field == "comments" || field == "comment") {
      comment = column;
    } else if (field == "student_star") {
      student_star = column;
    } else if (field == "star_rating") {
      star_rating = column;
    } else if (field == "diff_index") {
      diff_index = column;
    } else if (field == "student_difficult") {
      student_difficult = column;
    } else {
      throw DomainError("unknown logical column '" + field + "'");
    }
  }
}

std::string DropReport::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["rows_read"] = rows_read;
  j["retained"] = rows_read - dropped();
  j["missing_comment"] = missing_comment;
  j["unparsable_rating"] = unparsable_rating;
  j["out_of_range_rating"] = out_of_range_rating;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    rows.push_back({{"row", e.row}, {"reason", e.reason}});
  }
  j["dropped"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1, quote_line = 0;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row.front().empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };

  char ch;
  while (in.get(ch)) {
    if (ch == '\n') ++line;
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
          quote_line = line;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') {
          in.get(ch);
          ++line;
        }
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw IoError("line " + std::to_string(quote_line) + ": unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

enum class RatingStatus { Ok, Blank, Unparsable, OutOfRange };

RatingStatus parse_rating(std::string_view cell, std::optional<double>& out) {
  cell = trim(cell);
  out.reset();
  if (cell.empty()) return RatingStatus::Blank;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return RatingStatus::Unparsable;
  }
  if (v < 1.0 || v > 5.0) return RatingStatus::OutOfRange;
  out = v;
  return RatingStatus::Ok;
}

}  // namespace

ParseResult parse_csv(std::istream& in, const ColumnSchema& schema) {
  auto rows = read_csv_rows(in);
  if (rows.empty()) throw SchemaError("CSV input has no header row");

  const auto& header = rows.front();
  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto require_column = [&](const std::string& name) {
    auto idx = find_column(name);
    if (!idx) throw SchemaError("missing mandatory column '" + name + "'");
    return *idx;
  };

  const std::size_t comment_col = require_column(schema.comment);
  const std::size_t student_star_col = require_column(schema.student_star);
  const auto star_rating_col = find_column(schema.star_rating);
  const auto diff_index_col = find_column(schema.diff_index);
  const auto student_difficult_col = find_column(schema.student_difficult);

  std::vector<bool> mapped(header.size(), false);
  for (auto c : {std::optional<std::size_t>(comment_col), std::optional<std::size_t>(student_star_col),
                 star_rating_col, diff_index_col, student_difficult_col}) {
    if (c) mapped[*c] = true;
  }

  ParseResult result;
  result.drops.rows_read = rows.size() - 1;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    auto cell = [&](std::size_t c) -> std::string_view {
      return c < cells.size() ? std::string_view(cells[c]) : std::string_view{};
    };

    FeedbackRecord rec;
    rec.row = r;
    const auto comment = trim(cell(comment_col));
    if (comment.empty()) {
      ++result.drops.missing_comment;
      result.drops.entries.push_back({r, "missing comment"});
      continue;
    }
    rec.comment = std::string(comment);

    struct Slot {
      std::optional<std::size_t> col;
      std::optional<double>* dest;
    };
    const Slot slots[] = {{student_star_col, &rec.student_star},
                          {star_rating_col, &rec.star_rating},
                          {diff_index_col, &rec.diff_index},
                          {student_difficult_col, &rec.student_difficult}};
    RatingStatus worst = RatingStatus::Ok;
    for (const auto& slot : slots) {
      if (!slot.col) continue;
      const auto st = parse_rating(cell(*slot.col), *slot.dest);
      if (st == RatingStatus::Unparsable) {
        worst = st;
        break;
      }
      if (st == RatingStatus::OutOfRange) worst = st;
    }
    if (worst == RatingStatus::Unparsable) {
      ++result.drops.unparsable_rating;
      result.drops.entries.push_back({r, "unparsable rating"});
      continue;
    }
    if (worst == RatingStatus::OutOfRange) {
      ++result.drops.out_of_range_rating;
      result.drops.entries.push_back({r, "rating out of range"});
      continue;
    }

    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!mapped[c]) rec.extra.emplace(header[c], std::string(cell(c)));
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::optional<SentimentLabel> binarize_label(double student_star) {
  if (!(student_star >= 1.0 && student_star <= 5.0)) {
    throw DomainError("student_star " + std::to_string(student_star) + " outside [1, 5]");
  }
  if (student_star >= 3.5) return SentimentLabel::Positive;
  if (student_star <= 2.4) return SentimentLabel::Negative;
  return std::nullopt;
}

std::size_t train_size(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

DatasetSplit split(const std::vector<LabeledExample>& examples, double fraction,
                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("split fraction must lie in (0, 1)");
  }
  if (examples.empty()) throw DomainError("cannot split an empty example set");

  DatasetSplit out;
  out.seed = seed;
  out.fraction = fraction;

  // Strata: one per class with >= 2 members, plus a pooled stratum for
  // classes too small to stratify.
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_class[static_cast<int>(examples[i].label)].push_back(i);
  }
  std::vector<std::vector<std::size_t>> strata;
  std::vector<std::size_t> pooled;
  for (int c : {1, 0}) {
    if (by_class[c].empty()) continue;
    if (by_class[c].size() < 2) {
      out.warnings.push_back("class " + std::string(to_string(static_cast<SentimentLabel>(c))) +
                             " has fewer than 2 members; split unstratified");
      pooled.insert(pooled.end(), by_class[c].begin(), by_class[c].end());
    } else {
      strata.push_back(by_class[c]);
    }
  }
  if (!pooled.empty()) strata.push_back(std::move(pooled));

  const std::size_t total = train_size(examples.size(), fraction);
  std::vector<std::size_t> quota(strata.size());
  std::vector<double> remainder(strata.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const double exact = fraction * static_cast<double>(strata[s].size());
    quota[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - std::floor(exact);
    assigned += quota[s];
  }
  std::vector<std::size_t> order(strata.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total && k < order.size(); ++k) {
    auto s = order[k];
    if (quota[s] < strata[s].size()) {
      ++quota[s];
      ++assigned;
    }
  }

  Rng rng(seed);
  std::vector<bool> in_train(examples.size(), false);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    auto members = strata[s];
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t k = 0; k < quota[s]; ++k) in_train[members[k]] = true;
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (in_train[i] ? out.train : out.test).push_back(examples[i]);
  }
  return out;
}

}  // namespace sentiment
