#include "mieq/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mieq/error.hpp"

namespace mieq {
namespace {

std::array<double, 4> transpose(const std::array<double, 4>& x) { return {x[0], x[2], x[1], x[3]}; }
std::array<double, 4> swap_cols(const std::array<double, 4>& x) { return {x[1], x[0], x[3], x[2]}; }
std::array<double, 4> swap_rows(const std::array<double, 4>& x) { return {x[2], x[3], x[0], x[1]}; }

}  // namespace

Nats mi_from_fisher(double p_f, std::uint64_t n) {
  if (!(p_f > 0.0 && p_f <= 1.0)) {
    throw DomainError("mi_from_fisher: p-value must lie in (0, 1]");
  }
  return mi_from_log_fisher(std::log(p_f), n);
}

Nats mi_from_log_fisher(double log_p_f, std::uint64_t n) { return mi_from_log_pvalue(log_p_f, n); }

CanonicalTable2x2 canonicalize_2x2(const RelTable& r) {
  if (r.rows() != 2 || r.cols() != 2) {
    throw DomainError("canonicalize_2x2: table must be 2x2");
  }
  CanonicalTable2x2 c;
  c.x = {r.at(0, 0), r.at(0, 1), r.at(1, 0), r.at(1, 1)};

  const double min_row = std::min(c.x[0] + c.x[1], c.x[2] + c.x[3]);
  const double min_col = std::min(c.x[0] + c.x[2], c.x[1] + c.x[3]);
  if (min_row < min_col) {
    c.x = transpose(c.x);
    c.transposed = true;
  }
  const double col0 = c.x[0] + c.x[2];
  const double col1 = c.x[1] + c.x[3];
  if (col0 > col1) {
    c.x = swap_cols(c.x);
    c.col_swap = true;
  }
  if (c.x[1] * c.x[2] > c.x[0] * c.x[3]) {
    // Either swap inverts OR; a column swap is only allowed when it keeps col0 <= col1.
    if (col0 == col1) {
      c.x = swap_cols(c.x);
      c.col_swap = !c.col_swap;
    } else {
      c.x = swap_rows(c.x);
      c.row_swap = true;
    }
  }
  return c;
}

CountTable apply_canonical_permutation(const CountTable& t, const CanonicalTable2x2& c) {
  if (t.rows() != 2 || t.cols() != 2) {
    throw DomainError("apply_canonical_permutation: table must be 2x2");
  }
  CountTable out = c.transposed ? t.transposed() : t;
  auto x = out.cells();
  std::vector<Count> cells(x.begin(), x.end());
  if (c.col_swap) {
    std::swap(cells[0], cells[1]);
    std::swap(cells[2], cells[3]);
  }
  if (c.row_swap) {
    std::swap(cells[0], cells[2]);
    std::swap(cells[1], cells[3]);
  }
  return CountTable(2, 2, std::move(cells));
}

Interval er1_bounds_2x2(std::uint64_t n) {
  if (n == 0) {
    throw DomainError("er1_bounds_2x2: N must be positive");
  }
  const auto nn = static_cast<double>(n);
  const double log_n1 = std::log(nn + 1.0);
  return {-1.5 * log_n1 + 1.0 / (12.0 * (nn + 1.0)) - 1.0 / (2.0 * nn) - 0.735, 0.5 * log_n1 + 5.253};
}

Interval er2_bound_2x2(double odds_ratio) {
  if (!(odds_ratio > 1.0)) {
    throw DomainError("er2_bound_2x2: odds ratio must exceed 1");
  }
  if (std::isinf(odds_ratio)) {
    return {0.0, 0.0};
  }
  return {0.0, std::log(odds_ratio / (odds_ratio - 1.0))};
}

Interval bounds_mxn(std::uint64_t n, std::size_t m, std::size_t cols) {
  if (n == 0) {
    throw DomainError("bounds_mxn: N must be positive");
  }
  if (m < 2 || cols < 2) {
    throw DomainError("bounds_mxn: table must be at least 2x2");
  }
  const auto nn = static_cast<double>(n);
  const auto mn = static_cast<double>(m * cols);
  const double log_n1 = std::log(nn + 1.0);
  const double lower = -(mn - 1.0) / 2.0 * log_n1 + 1.0 / (12.0 * (nn + 1.0)) - 1.0 / (2.0 * nn) - mn / 2.0 + 1.265 -
                       (mn - 1.0) * std::log(nn + mn - 1.0);
  const double upper = 0.5 * log_n1 + 13.0 / 12.0 * mn + 0.919;
  return {lower, upper};
}

BoundCertificate check_certificate(const CountTable& t, const FisherResult& fisher) {
  BoundCertificate cert;
  cert.rows = t.rows();
  cert.cols = t.cols();
  cert.n = t.sample_size();
  const auto n = static_cast<std::uint64_t>(cert.n);
  const double mi = mutual_information(normalize(t)).value;
  cert.realized = 0.0 - fisher.log_p_f - static_cast<double>(n) * mi;

  const bool is_2x2 = t.rows() == 2 && t.cols() == 2;
  if (t.rows() >= 2 && t.cols() >= 2) {
    const Interval b = is_2x2 ? er1_bounds_2x2(n) : bounds_mxn(n, t.rows(), t.cols());
    cert.lower = b.lower;
    cert.upper = b.upper;
  }

  if (fisher.method != PValueMethod::Enumerated) {
    cert.reason = "p-value was sampled, not enumerated";
  } else if (t.rows() < 2 || t.cols() < 2) {
    cert.reason = "table has a single row or column";
  } else if (std::any_of(t.cells().begin(), t.cells().end(), [](Count c) { return c == 0; })) {
    cert.reason = "table has a zero cell";
  } else {
    cert.applicable = true;
  }

  if (is_2x2) {
    const auto canonical = canonicalize_2x2(normalize(t));
    const double odds = canonical.odds_ratio();
    if (std::isfinite(odds)) {
      cert.odds_ratio = odds;
    }
    if (cert.applicable && odds <= 1.0 + kOddsRatioTolerance) {
      cert.applicable = false;
      cert.reason = "odds ratio is 1";
    }
    if (odds > 1.0 + kOddsRatioTolerance) {
      cert.lower -= er2_bound_2x2(odds).upper;
    }
  }
  cert.pass = cert.applicable && cert.lower <= cert.realized && cert.realized <= cert.upper;
  return cert;
}

BoundCertificate check_certificate(const CountTable& t, double p_f) {
  if (!(p_f > 0.0 && p_f <= 1.0)) {
    throw DomainError("check_certificate: p-value must lie in (0, 1]");
  }
  FisherResult fisher;
  fisher.p_f = p_f;
  fisher.log_p_f = std::log(p_f);
  fisher.method = PValueMethod::Enumerated;
  return check_certificate(t, fisher);
}

}  // namespace mieq
