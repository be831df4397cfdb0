#include "mieq/infomeasure.hpp"

#include <cmath>
#include <numeric>

#include "mieq/combinat.hpp"
#include "mieq/error.hpp"

namespace mieq {
namespace {

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + ": probability must lie in (0, 1]");
  }
}

void require_mi(Nats mi, std::uint64_t n, const char* what) {
  if (!(mi.value >= 0.0) || std::isinf(mi.value)) {
    throw DomainError(std::string(what) + ": MI must be finite and nonnegative");
  }
  if (n == 0) {
    throw DomainError(std::string(what) + ": N must be positive");
  }
}

}  // namespace

Nats entropy(std::span<const double> dist) {
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) {
      throw DomainError("entropy: negative probability");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > kDistributionTolerance) {
    throw DomainError("entropy: probabilities must sum to 1");
  }
  double h = 0.0;
  for (double p : dist) {
    h -= xlogx(p);
  }
  return {h};
}

Nats entropy_uniform(UniformModel u) {
  if (u.state_count == 0) {
    throw DomainError("entropy_uniform: at least one state required");
  }
  return {std::log(static_cast<double>(u.state_count))};
}

Nats mutual_information(const RelTable& r) {
  const auto rows = r.row_margins();
  const auto cols = r.col_margins();
  double mi = 0.0;
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < r.cols(); ++j) {
      const double x = r.at(i, j);
      if (x > 0.0) {
        mi += x * std::log(x / (rows[i] * cols[j]));
      }
    }
  }
  if (mi < 0.0 && mi >= -kMiClamp) {
    mi = 0.0;
  }
  return {mi};
}

double log_pvalue_from_mi(Nats mi, std::uint64_t n) {
  require_mi(mi, n, "pvalue_from_mi");
  return -static_cast<double>(n) * mi.value;
}

double pvalue_from_mi(Nats mi, std::uint64_t n) { return std::exp(log_pvalue_from_mi(mi, n)); }

Nats mi_from_pvalue(double p, std::uint64_t n) {
  require_probability(p, "mi_from_pvalue");
  if (n == 0) {
    throw DomainError("mi_from_pvalue: N must be positive");
  }
  return mi_from_log_pvalue(std::log(p), n);
}

Nats mi_from_log_pvalue(double log_p, std::uint64_t n) {
  if (!(log_p <= 0.0) || std::isinf(log_p)) {
    throw DomainError("mi_from_log_pvalue: log p must be finite and nonpositive");
  }
  if (n == 0) {
    throw DomainError("mi_from_log_pvalue: N must be positive");
  }
  // 0.0 - x keeps ln(1) from printing as -0.
  return {(0.0 - log_p) / static_cast<double>(n)};
}

Nats self_information(double p) {
  require_probability(p, "self_information");
  return {0.0 - std::log(p)};
}

double mi_tail_density(Nats mi, std::uint64_t n) {
  require_mi(mi, n, "mi_tail_density");
  const auto nn = static_cast<double>(n);
  return nn * std::exp(-nn * mi.value);
}

}  // namespace mieq
