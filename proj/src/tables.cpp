#include "mieq/tables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "mieq/error.hpp"

namespace mieq {

CountTable::CountTable(std::size_t rows, std::size_t cols, std::vector<Count> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_) {
    throw DomainError("CountTable: cell count does not match shape");
  }
  if (std::any_of(cells_.begin(), cells_.end(), [](Count c) { return c < 0; })) {
    throw DomainError("CountTable: negative cell");
  }
  if (sample_size() < 1) {
    throw DomainError("CountTable: sample size must be at least 1");
  }
}

CountTable CountTable::from_rows(const std::vector<std::vector<Count>>& rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.front().size();
  std::vector<Count> cells;
  cells.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw DomainError("CountTable: ragged rows");
    }
    cells.insert(cells.end(), row.begin(), row.end());
  }
  return CountTable(m, n, std::move(cells));
}

std::vector<Count> CountTable::row_margins() const {
  std::vector<Count> a(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      a[i] += at(i, j);
    }
  }
  return a;
}

std::vector<Count> CountTable::col_margins() const {
  std::vector<Count> b(cols_, 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      b[j] += at(i, j);
    }
  }
  return b;
}

Count CountTable::sample_size() const { return std::accumulate(cells_.begin(), cells_.end(), Count{0}); }

CountTable CountTable::without_empty_margins() const {
  const auto a = row_margins();
  const auto b = col_margins();
  std::vector<std::size_t> keep_rows;
  std::vector<std::size_t> keep_cols;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (a[i] > 0) keep_rows.push_back(i);
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    if (b[j] > 0) keep_cols.push_back(j);
  }
  std::vector<Count> cells;
  cells.reserve(keep_rows.size() * keep_cols.size());
  for (auto i : keep_rows) {
    for (auto j : keep_cols) {
      cells.push_back(at(i, j));
    }
  }
  return CountTable(keep_rows.size(), keep_cols.size(), std::move(cells));
}

CountTable CountTable::transposed() const {
  std::vector<Count> cells(cells_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      cells[j * rows_ + i] = at(i, j);
    }
  }
  return CountTable(cols_, rows_, std::move(cells));
}

RelTable::RelTable(std::size_t rows, std::size_t cols, std::vector<double> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_) {
    throw DomainError("RelTable: cell count does not match shape");
  }
  if (std::any_of(cells_.begin(), cells_.end(), [](double x) { return !(x >= 0.0) || std::isinf(x); })) {
    throw DomainError("RelTable: cells must be finite and nonnegative");
  }
  const double total = std::accumulate(cells_.begin(), cells_.end(), 0.0);
  if (std::fabs(total - 1.0) > kSumTolerance) {
    throw DomainError("RelTable: cells must sum to 1");
  }
}

RelTable RelTable::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size();
  const std::size_t n = m == 0 ? 0 : rows.front().size();
  std::vector<double> cells;
  cells.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw DomainError("RelTable: ragged rows");
    }
    cells.insert(cells.end(), row.begin(), row.end());
  }
  return RelTable(m, n, std::move(cells));
}

std::vector<double> RelTable::row_margins() const {
  std::vector<double> a(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      a[i] += at(i, j);
    }
  }
  return a;
}

std::vector<double> RelTable::col_margins() const {
  std::vector<double> b(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      b[j] += at(i, j);
    }
  }
  return b;
}

RelTable normalize(const CountTable& t) {
  const auto n = static_cast<double>(t.sample_size());
  std::vector<double> cells;
  cells.reserve(t.cells().size());
  for (Count c : t.cells()) {
    cells.push_back(static_cast<double>(c) / n);
  }
  return RelTable(t.rows(), t.cols(), std::move(cells));
}

CountTable to_counts(const RelTable& r, Count n) {
  if (n < 1) {
    throw DomainError("to_counts: N must be positive");
  }
  const auto scale = static_cast<double>(n);
  const auto cells = r.cells();

  std::vector<Count> rounded(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    rounded[k] = static_cast<Count>(std::llround(cells[k] * scale));
  }
  if (std::accumulate(rounded.begin(), rounded.end(), Count{0}) == n) {
    return CountTable(r.rows(), r.cols(), std::move(rounded));
  }

  std::vector<Count> floors(cells.size());
  std::vector<double> remainders(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double scaled = cells[k] * scale;
    const double f = std::floor(scaled);
    floors[k] = static_cast<Count>(f);
    remainders[k] = scaled - f;
  }
  Count missing = n - std::accumulate(floors.begin(), floors.end(), Count{0});
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainders[x] > remainders[y]; });
  // Floors can undershoot by at most one unit per cell, so one pass suffices.
  for (std::size_t k = 0; k < order.size() && missing > 0; ++k, --missing) {
    ++floors[order[k]];
  }
  return CountTable(r.rows(), r.cols(), std::move(floors));
}

namespace {

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

Count parse_field(std::string_view field, std::size_t line, std::size_t column) {
  const auto f = trim(field);
  if (!f.empty() && f.front() == '-') {
    Count probe = 0;
    const auto [ptr, ec] = std::from_chars(f.data() + 1, f.data() + f.size(), probe);
    if (ec == std::errc{} && ptr == f.data() + f.size()) {
      throw ParseError(ParseErrorKind::Negative, line, column, "negative value at " + location(line, column));
    }
  }
  Count value = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
    throw ParseError(ParseErrorKind::NotInteger, line, column,
                     "expected a nonnegative integer at " + location(line, column));
  }
  return value;
}

}  // namespace

CountTable parse_table(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) {
    lines.pop_back();
  }
  if (lines.empty()) {
    throw ParseError(ParseErrorKind::Empty, 1, 1, "empty table");
  }

  std::vector<Count> cells;
  std::size_t width = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    std::size_t fields = 0;
    std::size_t pos = 0;
    const auto line = lines[li];
    while (true) {
      auto comma = line.find(',', pos);
      const auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      ++fields;
      if (li > 0 && fields > width) {
        throw ParseError(ParseErrorKind::RaggedRow, line_no, fields,
                         "row has more than " + std::to_string(width) + " fields at " + location(line_no, fields));
      }
      cells.push_back(parse_field(field, line_no, fields));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (li == 0) {
      width = fields;
    } else if (fields != width) {
      throw ParseError(ParseErrorKind::RaggedRow, line_no, fields + 1,
                       "row has " + std::to_string(fields) + " fields, expected " + std::to_string(width) + " at " +
                           location(line_no, fields + 1));
    }
  }
  return CountTable(lines.size(), width, std::move(cells));
}

std::string serialize_csv(const CountTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (j > 0) out += ',';
      out += std::to_string(t.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mieq
