#include "mieq/combinat.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mieq/error.hpp"

namespace mieq {
namespace {

// Running sums in extended precision, rounded once on the way out.
const std::vector<double>& exact_log_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kExactLogFactorialLimit + 1);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::uint64_t k = 1; k <= kExactLogFactorialLimit; ++k) {
      acc += std::log(static_cast<long double>(k));
      t[k] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

long double stirling_series(long double z, std::size_t terms) {
  long double s = (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
  const long double inv_z2 = 1.0L / (z * z);
  long double zpow = 1.0L / z;
  for (std::size_t k = 1; k <= terms; ++k) {
    const long double two_k = 2.0L * static_cast<long double>(k);
    s += static_cast<long double>(BernoulliTable::b2n[k - 1]) / (two_k * (two_k - 1.0L)) * zpow;
    zpow *= inv_z2;
  }
  return s;
}

// ln Gamma(a) for a a positive integer or half-integer.
double log_gamma_half_integer(double a) {
  const double twice = 2.0 * a;
  const auto k2 = static_cast<std::uint64_t>(std::llround(twice));
  if (k2 % 2 == 0) {
    return log_factorial(k2 / 2 - 1).value;
  }
  // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
  const std::uint64_t k = (k2 - 1) / 2;
  return log_factorial(2 * k).value - log_factorial(k).value - static_cast<double>(2 * k) * std::numbers::ln2 +
         0.5 * std::log(std::numbers::pi);
}

double log_gamma(double a) {
  const double twice = 2.0 * a;
  if (twice == std::round(twice) && a > 0.0 && twice < 1e15) {
    return log_gamma_half_integer(a);
  }
  int sign = 0;
  return ::lgamma_r(a, &sign);
}

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;

// ln P(a, x) by the power series; valid and fast for x < a + 1.
double log_gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      break;
    }
  }
  return std::log(sum) - x + a * std::log(x) - log_gamma(a);
}

// ln Q(a, x) by Lentz's continued fraction; valid for x >= a + 1.
double log_gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      break;
    }
  }
  return std::log(h) - x + a * std::log(x) - log_gamma(a);
}

}  // namespace

LogReal log_factorial(std::uint64_t n) {
  if (n <= kExactLogFactorialLimit) {
    return {exact_log_factorials()[n]};
  }
  // For z > 1024 the fourth series term is below 1e-24.
  return {static_cast<double>(stirling_series(static_cast<long double>(n) + 1.0L, 3))};
}

LogReal log_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    throw DomainError("log_binomial: k exceeds n");
  }
  // Summing the two lower terms first keeps C(n, k) and C(n, n - k) bitwise equal.
  return {log_factorial(n).value - (log_factorial(k).value + log_factorial(n - k).value)};
}

LogReal stirling_log_factorial(std::uint64_t n, std::size_t terms) {
  if (n == 0) {
    throw DomainError("stirling_log_factorial: n must be positive");
  }
  if (terms == 0 || terms > BernoulliTable::b2n.size()) {
    throw DomainError("stirling_log_factorial: term count outside the Bernoulli table");
  }
  return {static_cast<double>(stirling_series(static_cast<long double>(n) + 1.0L, terms))};
}

double xlogx(double x) {
  if (x < 0.0 || std::isnan(x)) {
    throw DomainError("xlogx: negative argument");
  }
  return x == 0.0 ? 0.0 : x * std::log(x);
}

double log_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
    throw DomainError("gamma_q: requires a > 0 and x >= 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (std::isinf(x)) {
    return -std::numeric_limits<double>::infinity();
  }
  if (x < a + 1.0) {
    return std::log1p(-std::exp(log_gamma_p_series(a, x)));
  }
  return log_gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

double chi2_log_sf(double x, unsigned df) {
  if (df == 0) {
    throw DomainError("chi2_sf: degrees of freedom must be positive");
  }
  return log_gamma_q(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, unsigned df) { return std::exp(chi2_log_sf(x, df)); }

}  // namespace mieq
