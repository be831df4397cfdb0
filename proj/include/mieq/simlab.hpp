#pragma once

// Monte Carlo study of how closely -ln(p)/N tracks MI on random tables, for
// Fisher's exact test and for the chi-square test.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mieq/exact_tests.hpp"
#include "mieq/random.hpp"
#include "mieq/tables.hpp"

namespace mieq {

enum class TableGenerator {
  // Cell probabilities uniform on the simplex, then N multinomial observations.
  DirichletMultinomial,
  // Independent uniform cells on [0, 2N/(mn)]; the realized total is kept.
  UniformCells,
};

struct ExperimentConfig {
  std::size_t rows = 2;
  std::size_t cols = 2;
  Count n = 1000;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  TableGenerator generator = TableGenerator::DirichletMultinomial;
  FisherMethod fisher_method = FisherMethod::Auto;
  std::uint64_t mc_samples = 100'000;

  // Throws DomainError unless trials >= 2, N >= mn, and both dimensions are positive.
  void validate() const;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  double mi = 0.0;
  double neg_log_pf_over_n = 0.0;
  double neg_log_pchi2_over_n = 0.0;
  PValueMethod pf_method = PValueMethod::Enumerated;
  bool cert_applicable = false;
  bool cert_pass = false;
  bool pchi2_underflow = false;  // P_chi2 rounds to 0; excluded from the chi-square fit

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct RegressionSummary {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;

  friend bool operator==(const RegressionSummary&, const RegressionSummary&) = default;
};

struct ExperimentSummary {
  RegressionSummary fisher;  // MI against -ln(P_F)/N
  RegressionSummary chi2;    // MI against -ln(P_chi2)/N
  std::size_t chi2_excluded = 0;
  std::size_t certificates_applicable = 0;
  std::size_t certificates_passed = 0;
};

// Rejects and redraws tables with an empty margin; throws DomainError after
// 1000 consecutive rejections.
CountTable generate_table(std::size_t rows, std::size_t cols, Count n, TableGenerator generator, SplitMix64& rng);

// Records come back in trial order. Trial t draws only from the stream
// (seed, t), so the output does not depend on `threads`.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// Least squares fit ys ~ slope * xs + intercept. Throws DomainError on
// mismatched or short input and when all xs are equal.
RegressionSummary regress(std::span<const double> xs, std::span<const double> ys);

ExperimentSummary summarize(std::span<const TrialRecord> records);

// One row per record under the header
// trial,mi,neg_log_pf_over_N,neg_log_pchi2_over_N,pf_method,cert_applicable,cert_pass
void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);

const char* to_string(PValueMethod m);
const char* to_string(TableGenerator g);

}  // namespace mieq
