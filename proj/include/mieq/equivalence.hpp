#pragma once

// MI recovered from a Fisher p-value, MI ~ -ln(P_F) / N, and certificates that
// check the realized gap -ln P_F - N * MI against explicit finite-N bounds.

#include <array>
#include <cstdint>
#include <optional>

#include "mieq/exact_tests.hpp"
#include "mieq/infomeasure.hpp"
#include "mieq/tables.hpp"

namespace mieq {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BoundCertificate {
  double realized = 0.0;  // -ln P_F - N * MI
  double lower = 0.0;
  double upper = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Count n = 0;
  std::optional<double> odds_ratio;  // 2x2 only
  bool applicable = false;
  bool pass = false;
  const char* reason = "";  // why the certificate does not apply
};

// A 2x2 relative table (cells X0 X1 / X2 X3, row-major) permuted so that
// X0 + X2 is the smallest margin and X1 X2 <= X0 X3.
struct CanonicalTable2x2 {
  std::array<double, 4> x{};
  bool transposed = false;
  bool row_swap = false;
  bool col_swap = false;

  double odds_ratio() const { return (x[0] * x[3]) / (x[1] * x[2]); }
};

// Odds ratios closer than this to 1 are treated as exactly 1.
inline constexpr double kOddsRatioTolerance = 1e-9;

// -ln(p_f) / N. Throws DomainError unless 0 < p_f <= 1.
Nats mi_from_fisher(double p_f, std::uint64_t n);
Nats mi_from_log_fisher(double log_p_f, std::uint64_t n);

// Ties between margins keep the identity permutation.
CanonicalTable2x2 canonicalize_2x2(const RelTable& r);
CountTable apply_canonical_permutation(const CountTable& t, const CanonicalTable2x2& c);

// Bounds on ER1 = -ln P_H - N * MI for 2x2 tables:
//   -3/2 ln(N+1) + 1/(12(N+1)) - 1/(2N) - 0.735  <  ER1  <  1/2 ln(N+1) + 5.253
Interval er1_bounds_2x2(std::uint64_t n);

// Bounds on ER2 = ln P_F - ln P_H: (0, ln(OR / (OR - 1))). Throws DomainError for OR <= 1.
Interval er2_bound_2x2(double odds_ratio);

// Bounds on -ln P_F - N * MI for m x n tables, m, n >= 2:
//   lower = -(mn-1)/2 ln(N+1) + 1/(12(N+1)) - 1/(2N) - mn/2 + 1.265 - (mn-1) ln(N+mn-1)
//   upper = 1/2 ln(N+1) + 13/12 mn + 0.919
Interval bounds_mxn(std::uint64_t n, std::size_t m, std::size_t cols);

// Certificate for a table and its Fisher p-value. Only enumerated p-values
// are certified; zero cells, OR = 1, and sampled p-values make it inapplicable.
BoundCertificate check_certificate(const CountTable& t, const FisherResult& fisher);
BoundCertificate check_certificate(const CountTable& t, double p_f);

}  // namespace mieq
