#pragma once

// Contingency tables in count form (integer frequencies) and relative form.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mieq {

using Count = std::int64_t;

// m x n table of nonnegative frequencies, row-major. Margins are recomputed
// from the cells on every call.
class CountTable {
 public:
  // Throws DomainError on negative cells, a size mismatch, or N == 0.
  CountTable(std::size_t rows, std::size_t cols, std::vector<Count> cells);

  static CountTable from_rows(const std::vector<std::vector<Count>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Count at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::span<const Count> cells() const noexcept { return cells_; }

  std::vector<Count> row_margins() const;
  std::vector<Count> col_margins() const;
  Count sample_size() const;

  // Drops every all-zero row and column. The result keeps at least one row and column.
  CountTable without_empty_margins() const;
  CountTable transposed() const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Count> cells_;
};

// m x n table of relative frequencies summing to one.
class RelTable {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws DomainError on negative cells, a size mismatch, or a sum away from 1.
  RelTable(std::size_t rows, std::size_t cols, std::vector<double> cells);

  static RelTable from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::span<const double> cells() const noexcept { return cells_; }

  std::vector<double> row_margins() const;
  std::vector<double> col_margins() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

RelTable normalize(const CountTable& t);

// Rounds N * X per cell. If the rounded cells miss N, the table is rebuilt by
// largest-remainder apportionment from the floors, ties going to the earlier
// cell in row-major order.
CountTable to_counts(const RelTable& r, Count n);

// Headerless CSV: one row per line, comma-separated nonnegative integers,
// LF or CRLF, optional trailing newline. Throws ParseError.
CountTable parse_table(std::string_view text);
std::string serialize_csv(const CountTable& t);

}  // namespace mieq
