#include "mieq/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "mieq/equivalence.hpp"
#include "mieq/error.hpp"
#include "mieq/exact_tests.hpp"
#include "mieq/infomeasure.hpp"
#include "mieq/meta.hpp"
#include "mieq/simlab.hpp"
#include "mieq/tables.hpp"

namespace mieq::cli {
namespace {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CountTable load_table(const std::string& path) {
  try {
    return parse_table(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), e.line(), e.column(), path + ": " + e.what());
  }
}

json envelope(const std::string& command, json inputs, json results, const std::vector<std::string>& warnings) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["inputs"] = std::move(inputs);
  j["results"] = std::move(results);
  j["warnings"] = warnings;
  return j;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, rows);
    }
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      flatten(j[k], prefix + "." + std::to_string(k), rows);
    }
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

void emit(std::ostream& out, const json& env, const std::string& format) {
  if (format == "csv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(env["results"], "", rows);
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
    return;
  }
  out << env.dump(2) << '\n';
}

FisherMethod parse_fisher_method(const std::string& s) {
  if (s == "enumerate") return FisherMethod::Enumerate;
  if (s == "montecarlo") return FisherMethod::MonteCarlo;
  return FisherMethod::Auto;
}

json certificate_json(const BoundCertificate& c) {
  json j;
  j["applicable"] = c.applicable;
  j["pass"] = c.pass;
  j["realized"] = c.realized;
  j["lower"] = c.lower;
  j["upper"] = c.upper;
  j["shape"] = {c.rows, c.cols};
  j["n"] = c.n;
  j["odds_ratio"] = c.odds_ratio ? json(*c.odds_ratio) : json(nullptr);
  if (!c.applicable) j["reason"] = c.reason;
  return j;
}

json fisher_json(const FisherResult& f) {
  json j;
  j["p_f"] = f.p_f;
  j["log_p_f"] = f.log_p_f;
  j["p_f_method"] = to_string(f.method);
  j["p_f_stderr"] = f.stderr_p;
  return j;
}

json table_json(const CountTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json regression_json(const RegressionSummary& r) {
  return {{"slope", r.slope}, {"intercept", r.intercept}, {"r_squared", r.r_squared}, {"n_points", r.n_points}};
}

struct TestFlags {
  std::string table_path;
  std::string method = "auto";
  std::uint64_t mc_samples = 100'000;
  std::uint64_t seed = 0;
  std::string format = "json";
};

int cmd_test(const TestFlags& f, std::ostream& out) {
  const CountTable table = load_table(f.table_path);
  FisherOptions options{parse_fisher_method(f.method), f.mc_samples, f.seed};
  const TestReport report = run_tests(table, options);
  const BoundCertificate cert = check_certificate(table, report.fisher);

  std::vector<std::string> warnings;
  if (table.without_empty_margins().cells().size() != table.cells().size()) {
    warnings.emplace_back("empty rows or columns were dropped before testing");
  }
  if (report.fisher.method == PValueMethod::MonteCarlo) {
    warnings.emplace_back("P_F was estimated by sampling; the certificate does not apply");
  }

  json inputs{{"table", f.table_path}, {"method", f.method}, {"mc_samples", f.mc_samples}, {"seed", f.seed}};
  json results;
  results["shape"] = {table.rows(), table.cols()};
  results["n"] = report.n;
  results["p_h"] = report.p_h;
  results["log_p_h"] = report.log_p_h;
  const json fisher = fisher_json(report.fisher);
  for (const auto& [k, v] : fisher.items()) results[k] = v;
  results["p_chi2"] = report.chi2.p;
  results["log_p_chi2"] = report.chi2.log_p;
  results["chi2_statistic"] = report.chi2.statistic;
  results["chi2_df"] = report.chi2.df;
  results["mi"] = report.mi.value;
  results["mi_from_fisher"] = mi_from_log_fisher(report.fisher.log_p_f, static_cast<std::uint64_t>(report.n)).value;
  results["certificate"] = certificate_json(cert);
  emit(out, envelope("test", inputs, results, warnings), f.format);
  return kOk;
}

struct ConvertFlags {
  std::optional<double> mi;
  std::optional<double> pvalue;
  std::uint64_t n = 1;
  std::string format = "json";
};

int cmd_convert(const ConvertFlags& f, std::ostream& out) {
  if (f.mi.has_value() == f.pvalue.has_value()) {
    throw UsageError("convert: give exactly one of --mi or --pvalue");
  }
  if (f.n < 1) {
    throw UsageError("convert: --n must be at least 1");
  }
  json inputs;
  json results;
  double mi = 0.0;
  double log_p = 0.0;
  if (f.mi) {
    inputs["mi"] = *f.mi;
    mi = *f.mi;
    log_p = log_pvalue_from_mi(Nats{mi}, f.n);
  } else {
    inputs["pvalue"] = *f.pvalue;
    mi = mi_from_pvalue(*f.pvalue, f.n).value;
    log_p = std::log(*f.pvalue);
  }
  inputs["n"] = f.n;
  results["mi"] = mi;
  results["pvalue"] = std::exp(log_p);
  results["log_pvalue"] = log_p;
  results["total_mi"] = static_cast<double>(f.n) * mi;
  results["mi_threshold"] = kSignificantTotalMi / static_cast<double>(f.n);
  results["meets_mi_threshold"] = static_cast<double>(f.n) * mi >= kSignificantTotalMi;
  results["pvalue_at_most_0_05"] = log_p <= std::log(0.05);
  emit(out, envelope("convert", inputs, results, {}), f.format);
  return kOk;
}

struct MetaFlags {
  std::vector<std::string> paths;
  std::vector<double> pvalues;
  std::vector<Count> sizes;
  std::string mode = "cellwise";
  std::string method = "auto";
  std::uint64_t mc_samples = 100'000;
  std::uint64_t seed = 0;
  std::string format = "json";
};

int cmd_meta(const MetaFlags& f, std::ostream& out) {
  json inputs{{"tables", f.paths}, {"mode", f.mode}};
  json results;
  std::vector<std::string> warnings;
  const FisherOptions options{parse_fisher_method(f.method), f.mc_samples, f.seed};

  if (f.mode == "combine" && !f.pvalues.empty()) {
    if (!f.paths.empty()) {
      throw UsageError("meta: give either table files or --pvalues, not both");
    }
    inputs["pvalues"] = f.pvalues;
    inputs["sizes"] = f.sizes;
    std::vector<Count> sizes = f.sizes;
    if (sizes.empty()) {
      sizes.assign(f.pvalues.size(), 1);
      warnings.emplace_back("no --sizes given; every study counted with N = 1");
    }
    const CombinedPValue c = combine_pvalues(f.pvalues, sizes);
    results = {{"p_s", c.p_s}, {"log_p_s", c.log_p_s}, {"n_s", c.n_s}, {"mi_s", c.mi_s.value}};
    emit(out, envelope("meta", inputs, results, warnings), f.format);
    return kOk;
  }
  if (f.paths.empty()) {
    throw UsageError("meta: at least one table file required");
  }
  std::vector<CountTable> tables;
  for (const auto& p : f.paths) tables.push_back(load_table(p));

  if (f.mode == "cellwise") {
    const PooledResult r = pool_cellwise(StudySet(std::move(tables)), options);
    results["method"] = "cellwise";
    results["pooled_table"] = table_json(r.pooled_table);
    results["n_s"] = r.n_s;
    results["mi_s"] = r.mi_s.value;
    results["p_s"] = r.fisher.p_f;
    results["log_p_s"] = r.fisher.log_p_f;
    results["p_s_method"] = to_string(r.fisher.method);
    results["p_s_stderr"] = r.fisher.stderr_p;
    results["mi_from_fisher"] = mi_from_log_fisher(r.fisher.log_p_f, static_cast<std::uint64_t>(r.n_s)).value;
    results["certificate"] = certificate_json(r.certificate);
  } else if (f.mode == "weighted" || f.mode == "combine") {
    std::vector<StudyMi> mis;
    std::vector<double> log_pf;
    std::vector<Count> sizes;
    json studies = json::array();
    for (const auto& t : tables) {
      const Nats mi = mutual_information(normalize(t));
      const Count n = t.sample_size();
      const FisherResult fr = fisher_exact(t, options);
      mis.push_back({n, mi});
      log_pf.push_back(fr.log_p_f);
      sizes.push_back(n);
      studies.push_back({{"n", n},
                         {"mi", mi.value},
                         {"p_h", per_study_pvalue(mi, n)},
                         {"log_p_h", log_pvalue_from_mi(mi, static_cast<std::uint64_t>(n))},
                         {"p_f", fr.p_f},
                         {"log_p_f", fr.log_p_f},
                         {"p_f_method", to_string(fr.method)}});
    }
    const StudyMi w = pool_weighted(mis);
    const CombinedPValue c = combine_log_pvalues(log_pf, sizes);
    results["method"] = f.mode;
    results["studies"] = studies;
    results["n_s"] = w.n;
    if (f.mode == "weighted") {
      results["mi_s"] = w.mi.value;
      results["p_s"] = per_study_pvalue(w.mi, w.n);
      results["mi_s_from_combined_fisher"] = c.mi_s.value;
    } else {
      results["mi_s"] = c.mi_s.value;
      results["p_s"] = c.p_s;
      results["log_p_s"] = c.log_p_s;
      results["mi_s_weighted"] = w.mi.value;
    }
    results["gap"] = c.mi_s.value - w.mi.value;
  } else {
    throw UsageError("meta: unknown mode " + f.mode);
  }
  emit(out, envelope("meta", inputs, results, warnings), f.format);
  return kOk;
}

struct SimulateFlags {
  std::string shape = "2,2";
  Count n = 1000;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string generator = "dirichlet_multinomial";
  std::string fisher_method = "auto";
  std::uint64_t mc_samples = 100'000;
  std::string out_path;
  unsigned threads = 0;
  std::string format = "json";
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  ExperimentConfig cfg;
  const auto comma = f.shape.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("shape");
    cfg.rows = std::stoul(f.shape.substr(0, comma));
    cfg.cols = std::stoul(f.shape.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageError("simulate: --shape must look like m,n");
  }
  cfg.n = f.n;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  cfg.generator =
      f.generator == "uniform_cells" ? TableGenerator::UniformCells : TableGenerator::DirichletMultinomial;
  cfg.fisher_method = parse_fisher_method(f.fisher_method);
  cfg.mc_samples = f.mc_samples;
  cfg.validate();

  std::ofstream csv;
  if (!f.out_path.empty()) {
    csv.open(f.out_path, std::ios::binary | std::ios::trunc);
    if (!csv) {
      throw IoError("cannot write " + f.out_path);
    }
  }

  const unsigned threads = f.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : f.threads;
  const auto records = run_experiment(cfg, threads);
  const auto summary = summarize(records);

  if (csv.is_open()) {
    write_trials_csv(csv, records);
    csv.flush();
    if (!csv) {
      throw IoError("failed writing " + f.out_path);
    }
  }
  if (f.format == "csv") {
    write_trials_csv(out, records);
    return kOk;
  }

  std::vector<std::string> warnings;
  if (summary.chi2_excluded > 0) {
    warnings.push_back(std::to_string(summary.chi2_excluded) +
                       " trials had P_chi2 underflow to 0 and were left out of the chi-square fit");
  }
  json inputs{{"shape", {cfg.rows, cfg.cols}},     {"n", cfg.n},
              {"trials", cfg.trials},               {"seed", cfg.seed},
              {"generator", to_string(cfg.generator)}, {"fisher_method", f.fisher_method},
              {"mc_samples", cfg.mc_samples},       {"out", f.out_path}};
  json results;
  results["fisher_regression"] = regression_json(summary.fisher);
  results["chi2_regression"] = regression_json(summary.chi2);
  results["chi2_excluded"] = summary.chi2_excluded;
  results["certificates_applicable"] = summary.certificates_applicable;
  results["certificates_passed"] = summary.certificates_passed;
  emit(out, envelope("simulate", inputs, results, warnings), "json");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact dependence tests and mutual information on contingency tables", "mieq"};
  app.require_subcommand(1);

  const std::vector<std::string> methods{"auto", "enumerate", "montecarlo"};
  const std::vector<std::string> formats{"json", "csv"};

  TestFlags test;
  auto* test_cmd = app.add_subcommand("test", "Fisher, hypergeometric and chi-square tests plus MI for one table");
  test_cmd->add_option("table", test.table_path, "Headerless CSV table")->required();
  test_cmd->add_option("--method", test.method, "Fisher p-value method")->check(CLI::IsMember(methods));
  test_cmd->add_option("--mc-samples", test.mc_samples, "Samples for the Monte Carlo p-value");
  test_cmd->add_option("--seed", test.seed, "Seed for the Monte Carlo p-value");
  test_cmd->add_option("--format", test.format)->check(CLI::IsMember(formats));

  ConvertFlags convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between MI and p-value, p = exp(-N MI)");
  convert_cmd->add_option("--mi", convert.mi, "Mutual information in nats");
  convert_cmd->add_option("--pvalue", convert.pvalue, "p-value in (0, 1]");
  convert_cmd->add_option("--n", convert.n, "Sample size")->required();
  convert_cmd->add_option("--format", convert.format)->check(CLI::IsMember(formats));

  MetaFlags meta;
  auto* meta_cmd = app.add_subcommand("meta", "Pool several studies");
  meta_cmd->add_option("tables", meta.paths, "Headerless CSV tables, one per study");
  meta_cmd->add_option("--mode", meta.mode)->check(CLI::IsMember({"cellwise", "weighted", "combine"}));
  meta_cmd->add_option("--pvalues", meta.pvalues, "Per-study p-values for --mode combine")->delimiter(',');
  meta_cmd->add_option("--sizes", meta.sizes, "Per-study sample sizes for --pvalues")->delimiter(',');
  meta_cmd->add_option("--method", meta.method)->check(CLI::IsMember(methods));
  meta_cmd->add_option("--mc-samples", meta.mc_samples);
  meta_cmd->add_option("--seed", meta.seed);
  meta_cmd->add_option("--format", meta.format)->check(CLI::IsMember(formats));

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of MI against -ln(p)/N");
  sim_cmd->add_option("--shape", sim.shape, "Table shape m,n");
  sim_cmd->add_option("--n", sim.n, "Sample size per table");
  sim_cmd->add_option("--trials", sim.trials);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--generator", sim.generator)
      ->check(CLI::IsMember({"dirichlet_multinomial", "uniform_cells"}));
  sim_cmd->add_option("--fisher-method", sim.fisher_method)->check(CLI::IsMember(methods));
  sim_cmd->add_option("--mc-samples", sim.mc_samples);
  sim_cmd->add_option("--out", sim.out_path, "Write one CSV row per trial here");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--format", sim.format)->check(CLI::IsMember(formats));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*test_cmd) return cmd_test(test, out);
    if (*convert_cmd) return cmd_convert(convert, out);
    if (*meta_cmd) return cmd_meta(meta, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}

}  // namespace mieq::cli
