#pragma once

// Log-space combinatorics and the special functions the tests need.

#include <array>
#include <compare>
#include <cstdint>

namespace mieq {

// Natural logarithm of a positive quantity.
struct LogReal {
  double value = 0.0;

  friend auto operator<=>(const LogReal&, const LogReal&) = default;
};

// Bernoulli numbers B_2, B_4, ..., B_20 with their usual signs.
struct BernoulliTable {
  static constexpr std::array<double, 10> b2n = {
      1.0 / 6.0,        -1.0 / 30.0,     1.0 / 42.0,       -1.0 / 30.0,       5.0 / 66.0,
      -691.0 / 2730.0,  7.0 / 6.0,       -3617.0 / 510.0,  43867.0 / 798.0,   -174611.0 / 330.0,
  };
};

// Below this n, ln(n!) is an exact running sum of ln k; above it the Stirling series is used.
inline constexpr std::uint64_t kExactLogFactorialLimit = 1024;

LogReal log_factorial(std::uint64_t n);

// ln C(n, k). Throws DomainError when k > n.
LogReal log_binomial(std::uint64_t n, std::uint64_t k);

// ln Gamma(n + 1) from the exact Stirling expansion around z = n + 1,
// truncated after `terms` Bernoulli terms:
//   (z - 1/2) ln z - z + ln(2 pi)/2 + sum_k B_2k / (2k (2k - 1) z^(2k-1)).
LogReal stirling_log_factorial(std::uint64_t n, std::size_t terms);

// x ln x with 0 ln 0 = 0. Throws DomainError for x < 0.
double xlogx(double x);

// Regularized upper incomplete gamma Q(a, x) and its logarithm. The log form
// stays finite far past the point where Q itself underflows.
double gamma_q(double a, double x);
double log_gamma_q(double a, double x);

// Survival function of the chi-square distribution, Q(df/2, x/2).
double chi2_sf(double x, unsigned df);
double chi2_log_sf(double x, unsigned df);

}  // namespace mieq
