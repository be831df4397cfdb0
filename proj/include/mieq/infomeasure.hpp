#pragma once

// Entropies, mutual information, and the conversions between an amount of
// information and the probability of observing at least that much of it
// under the maximum-entropy null: p = exp(-N * MI).

#include <compare>
#include <cstdint>
#include <span>

#include "mieq/tables.hpp"

namespace mieq {

// Information in nats.
struct Nats {
  double value = 0.0;

  friend auto operator<=>(const Nats&, const Nats&) = default;
};

// W equiprobable states.
struct UniformModel {
  std::uint64_t state_count = 1;
};

// Tolerance on sum(dist) = 1 accepted by entropy().
inline constexpr double kDistributionTolerance = 1e-9;
// MI values in [-kMiClamp, 0) are rounding noise and are returned as 0.
inline constexpr double kMiClamp = 1e-12;

Nats entropy(std::span<const double> dist);
Nats entropy_uniform(UniformModel u);

// Plug-in mutual information, sum X_ij ln(X_ij / (row_i col_j)).
Nats mutual_information(const RelTable& r);

// exp(-N * mi). With N = 1 this is the probability of information mi itself.
double pvalue_from_mi(Nats mi, std::uint64_t n);
// -N * mi; the same quantity without underflow.
double log_pvalue_from_mi(Nats mi, std::uint64_t n);
// -ln(p) / N. Throws DomainError unless 0 < p <= 1.
Nats mi_from_pvalue(double p, std::uint64_t n);
// -log_p / N, for p-values below the double range.
Nats mi_from_log_pvalue(double log_p, std::uint64_t n);
// -ln(p). Throws DomainError unless 0 < p <= 1.
Nats self_information(double p);
// Density of N * MI at mi: N exp(-N mi). Integrates to pvalue_from_mi over [mi, inf).
double mi_tail_density(Nats mi, std::uint64_t n);

// MI at or above this many nats per observation is significant at p = exp(-3) ~ 0.05.
inline constexpr double kSignificantTotalMi = 3.00;

}  // namespace mieq
