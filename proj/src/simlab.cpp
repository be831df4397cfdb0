#include "mieq/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include "mieq/equivalence.hpp"
#include "mieq/error.hpp"
#include "mieq/infomeasure.hpp"

namespace mieq {
namespace {

constexpr int kMaxRejections = 1000;
// Offsets the per-trial Fisher Monte Carlo streams from the table streams.
constexpr std::uint64_t kFisherStreamSalt = 0x6A09E667F3BCC909ULL;

std::vector<Count> draw_dirichlet_multinomial(std::size_t cells, Count n, SplitMix64& rng) {
  std::vector<double> cumulative(cells);
  double total = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    total += -std::log1p(-rng.uniform());
    cumulative[k] = total;
  }
  std::vector<Count> counts(cells, 0);
  for (Count obs = 0; obs < n; ++obs) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cells - 1);
    ++counts[k];
  }
  return counts;
}

std::vector<Count> draw_uniform_cells(std::size_t cells, Count n, SplitMix64& rng) {
  const auto bound = static_cast<std::uint64_t>(2 * n / static_cast<Count>(cells));
  std::vector<Count> counts(cells);
  for (auto& c : counts) {
    c = static_cast<Count>(rng.uniform_int(bound));
  }
  return counts;
}

bool has_empty_margin(std::size_t rows, std::size_t cols, const std::vector<Count>& cells) {
  for (std::size_t i = 0; i < rows; ++i) {
    Count s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += cells[i * cols + j];
    if (s == 0) return true;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    Count s = 0;
    for (std::size_t i = 0; i < rows; ++i) s += cells[i * cols + j];
    if (s == 0) return true;
  }
  return false;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial) {
  SplitMix64 rng = SplitMix64::stream(cfg.seed, trial);
  const CountTable table = generate_table(cfg.rows, cfg.cols, cfg.n, cfg.generator, rng);
  FisherOptions options;
  options.method = cfg.fisher_method;
  options.mc_samples = cfg.mc_samples;
  options.seed = SplitMix64::stream(cfg.seed ^ kFisherStreamSalt, trial)();
  const TestReport report = run_tests(table, options);
  const BoundCertificate cert = check_certificate(table, report.fisher);

  const auto n = static_cast<double>(report.n);
  TrialRecord r;
  r.trial = trial;
  r.mi = report.mi.value;
  r.neg_log_pf_over_n = -report.fisher.log_p_f / n;
  r.neg_log_pchi2_over_n = -report.chi2.log_p / n;
  r.pf_method = report.fisher.method;
  r.cert_applicable = cert.applicable;
  r.cert_pass = cert.pass;
  r.pchi2_underflow = report.chi2.p == 0.0;
  return r;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rows == 0 || cols == 0) {
    throw DomainError("ExperimentConfig: shape must be positive");
  }
  if (trials < 2) {
    throw DomainError("ExperimentConfig: at least two trials required");
  }
  if (n < static_cast<Count>(rows * cols)) {
    throw DomainError("ExperimentConfig: N must be at least m*n");
  }
  if (fisher_method == FisherMethod::MonteCarlo && mc_samples == 0) {
    throw DomainError("ExperimentConfig: Monte Carlo needs at least one sample");
  }
}

CountTable generate_table(std::size_t rows, std::size_t cols, Count n, TableGenerator generator, SplitMix64& rng) {
  if (rows == 0 || cols == 0 || n < 1) {
    throw DomainError("generate_table: shape and N must be positive");
  }
  const std::size_t cells = rows * cols;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<Count> counts = generator == TableGenerator::DirichletMultinomial
                                    ? draw_dirichlet_multinomial(cells, n, rng)
                                    : draw_uniform_cells(cells, n, rng);
    if (std::accumulate(counts.begin(), counts.end(), Count{0}) == 0 || has_empty_margin(rows, cols, counts)) {
      continue;
    }
    return CountTable(rows, cols, std::move(counts));
  }
  throw DomainError("generate_table: configuration keeps producing tables with an empty margin");
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<TrialRecord> records(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t t = next++; t < cfg.trials; t = next++) {
      try {
        records[t] = run_trial(cfg, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.trials)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

RegressionSummary regress(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DomainError("regress: xs and ys differ in length");
  }
  if (xs.size() < 2) {
    throw DomainError("regress: at least two points required");
  }
  const auto count = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mean_x;
    const double dy = ys[k] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    throw DomainError("regress: all xs are equal");
  }
  RegressionSummary r;
  r.n_points = xs.size();
  r.slope = sxy / sxx;
  r.intercept = mean_y - r.slope * mean_x;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (r.slope * xs[k] + r.intercept);
    ss_res += e * e;
  }
  r.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return r;
}

ExperimentSummary summarize(std::span<const TrialRecord> records) {
  ExperimentSummary s;
  std::vector<double> mi;
  std::vector<double> pf;
  std::vector<double> chi_mi;
  std::vector<double> chi;
  for (const auto& r : records) {
    mi.push_back(r.mi);
    pf.push_back(r.neg_log_pf_over_n);
    if (r.pchi2_underflow) {
      ++s.chi2_excluded;
    } else {
      chi_mi.push_back(r.mi);
      chi.push_back(r.neg_log_pchi2_over_n);
    }
    s.certificates_applicable += r.cert_applicable ? 1 : 0;
    s.certificates_passed += r.cert_pass ? 1 : 0;
  }
  s.fisher = regress(pf, mi);
  s.chi2 = regress(chi, chi_mi);
  return s;
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << "trial,mi,neg_log_pf_over_N,neg_log_pchi2_over_N,pf_method,cert_applicable,cert_pass\n";
  for (const auto& r : records) {
    out << r.trial << ',' << format_double(r.mi) << ',' << format_double(r.neg_log_pf_over_n) << ','
        << format_double(r.neg_log_pchi2_over_n) << ',' << to_string(r.pf_method) << ','
        << (r.cert_applicable ? 1 : 0) << ',' << (r.cert_pass ? 1 : 0) << '\n';
  }
}

const char* to_string(PValueMethod m) { return m == PValueMethod::Enumerated ? "enumerated" : "montecarlo"; }

const char* to_string(TableGenerator g) {
  return g == TableGenerator::DirichletMultinomial ? "dirichlet_multinomial" : "uniform_cells";
}

}  // namespace mieq
