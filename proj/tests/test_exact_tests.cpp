#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "mieq/error.hpp"
#include "mieq/exact_tests.hpp"
#include "oracles.hpp"

using namespace mieq;

namespace {

oracle::Table to_oracle(const CountTable& t) {
  return {t.rows(), t.cols(), std::vector<std::int64_t>(t.cells().begin(), t.cells().end())};
}

CountTable random_table(std::mt19937_64& rng, std::size_t m, std::size_t n, Count max_cell) {
  std::uniform_int_distribution<Count> cell(0, max_cell);
  std::vector<Count> cells(m * n);
  do {
    for (auto& c : cells) c = cell(rng);
  } while (std::accumulate(cells.begin(), cells.end(), Count{0}) == 0);
  return CountTable(m, n, cells);
}

CountTable permute(const CountTable& t, const std::vector<std::size_t>& rp, const std::vector<std::size_t>& cp) {
  std::vector<Count> cells(t.cells().size());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) cells[i * t.cols() + j] = t.at(rp[i], cp[j]);
  return CountTable(t.rows(), t.cols(), cells);
}

}  // namespace

TEST_CASE("log_table_prob examples") {
  CHECK(log_table_prob(CountTable::from_rows({{3, 1}, {1, 3}})).value ==
        doctest::Approx(std::log(16.0 / 70.0)).epsilon(1e-14));
  CHECK(log_table_prob(CountTable::from_rows({{3, 1}, {1, 3}})).value == doctest::Approx(-1.47591).epsilon(1e-5));
  CHECK(log_table_prob(CountTable::from_rows({{1, 0}, {0, 1}})).value ==
        doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(log_table_prob(CountTable::from_rows({{9}})).value == 0.0);
}

TEST_CASE("hypergeom_pvalue examples") {
  CHECK(hypergeom_pvalue(CountTable::from_rows({{3, 1}, {1, 3}})) == doctest::Approx(16.0 / 70.0).epsilon(1e-14));
  CHECK(hypergeom_pvalue(CountTable::from_rows({{1, 0}, {0, 1}})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hypergeom_pvalue(CountTable::from_rows({{2, 5, 1}, {0, 0, 0}})) == 1.0);
  CHECK(hypergeom_pvalue(CountTable::from_rows({{4, 0, 3}})) == 1.0);
}

TEST_CASE("log_table_prob agrees with exact rationals") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 200; ++k) {
    const auto t = random_table(rng, 2 + k % 3, 2 + (k / 3) % 3, 12);
    const double expected = oracle::log_of(oracle::table_probability(to_oracle(t)));
    CHECK(std::fabs(log_table_prob(t).value - expected) <= 1e-12 * std::max(1.0, std::fabs(expected)));
  }
}

TEST_CASE("fisher_exact examples") {
  const auto f = fisher_exact(CountTable::from_rows({{3, 1}, {1, 3}}));
  CHECK(f.p_f == doctest::Approx(34.0 / 70.0).epsilon(1e-14));
  CHECK(f.method == PValueMethod::Enumerated);
  CHECK(f.stderr_p == 0.0);
  CHECK(fisher_exact(CountTable::from_rows({{2, 2}, {2, 2}})).p_f == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fisher_exact(CountTable::from_rows({{1, 0}, {0, 1}})).p_f == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fisher_exact(CountTable::from_rows({{1, 4, 2}})).p_f == 1.0);
  CHECK(fisher_exact(CountTable::from_rows({{1, 0, 2}, {0, 0, 0}, {5, 0, 7}})).p_f ==
        doctest::Approx(fisher_exact(CountTable::from_rows({{1, 2}, {5, 7}})).p_f).epsilon(1e-15));
}

TEST_CASE("fisher_exact matches brute-force enumeration with exact arithmetic") {
  std::mt19937_64 rng(32);
  struct Shape {
    std::size_t m, n;
    Count max_cell;
  };
  for (Shape s : {Shape{2, 2, 5}, Shape{2, 3, 3}, Shape{3, 2, 3}, Shape{3, 3, 1}}) {
    for (int k = 0; k < 25; ++k) {
      const auto t = random_table(rng, s.m, s.n, s.max_cell);
      const auto reduced = t.without_empty_margins();
      if (reduced.rows() < 2 || reduced.cols() < 2) continue;
      const auto exact = oracle::fisher(to_oracle(t));
      const auto got = fisher_exact(t);
      CHECK(got.log_p_f == doctest::Approx(oracle::log_of(exact.p_f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("fisher_exact invariance under permutation and transposition") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 60; ++k) {
    const std::size_t m = 2 + k % 2;
    const std::size_t n = 2 + (k / 2) % 3;
    const auto t = random_table(rng, m, n, 6);
    std::vector<std::size_t> rp(m);
    std::vector<std::size_t> cp(n);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    const double base = fisher_exact(t).log_p_f;
    CHECK(fisher_exact(permute(t, rp, cp)).log_p_f == doctest::Approx(base).epsilon(1e-12));
    CHECK(fisher_exact(t.transposed()).log_p_f == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("general enumeration agrees with the 2x2 single-cell walk") {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<Count> big(0, 400);
  for (int k = 0; k < 300; ++k) {
    const auto t = k < 150 ? random_table(rng, 2, 2, 15) : CountTable(2, 2, {big(rng), big(rng), big(rng), big(rng) + 1});
    const auto general = fisher_exact(t, {FisherMethod::Enumerate, 1, 0});
    const auto walk = fisher_exact_2x2(t);
    CHECK(general.log_p_f == doctest::Approx(walk.log_p_f).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("P_H <= P_F <= 1") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 200; ++k) {
    const auto t = random_table(rng, 2 + k % 3, 2 + (k / 3) % 2, 10);
    const auto report = run_tests(t);
    CHECK(report.p_h > 0.0);
    CHECK(report.log_p_h <= report.fisher.log_p_f + 1e-12);
    CHECK(report.fisher.p_f <= 1.0);
  }
}

TEST_CASE("table probabilities sum to one over each margin family") {
  std::mt19937_64 rng(36);
  for (int k = 0; k < 40; ++k) {
    const auto t = random_table(rng, 2 + k % 3, 2 + (k / 3) % 3, 8);
    const MarginSpec spec = MarginSpec::of(t);
    if (count_tables(spec, 100'000) > 100'000) continue;
    double total = 0.0;
    std::uint64_t visited = 0;
    for_each_table(spec, [&](std::span<const Count>, double lp) {
      total += std::exp(lp);
      ++visited;
    });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(visited == count_tables(spec));
  }
}

TEST_CASE("enumeration visits exactly the brute-force family") {
  const MarginSpec spec{{3, 2, 1}, {2, 2, 2}};
  const auto brute = oracle::brute_force_tables(spec.row_margins, spec.col_margins);
  std::vector<std::vector<Count>> seen;
  for_each_table(spec, [&](std::span<const Count> cells, double lp) {
    seen.emplace_back(cells.begin(), cells.end());
    const oracle::Table t{3, 3, seen.back()};
    CHECK(lp == doctest::Approx(oracle::log_of(oracle::table_probability(t))).epsilon(1e-13));
  });
  std::vector<std::vector<Count>> expected;
  for (const auto& t : brute) expected.push_back(t.cells);
  std::sort(seen.begin(), seen.end());
  std::sort(expected.begin(), expected.end());
  CHECK(seen == expected);
  CHECK(count_tables(spec) == brute.size());
}

TEST_CASE("count_tables saturates at the cap") {
  const MarginSpec spec{{20, 20, 20}, {20, 20, 20}};
  const auto full = count_tables(spec, 1'000'000'000);
  CHECK(full > 1000);
  CHECK(count_tables(spec, 1000) == 1001);
  CHECK(count_tables({{5, 5}, {5, 5}}) == 6);
}

TEST_CASE("auto switches to sampling for large families") {
  std::vector<Count> cells(36, 10);
  const CountTable big(6, 6, cells);
  CHECK(count_tables(MarginSpec::of(big)) > kAutoEnumerationLimit);
  const auto r = fisher_exact(big, {FisherMethod::Auto, 200, 4});
  CHECK(r.method == PValueMethod::MonteCarlo);
  CHECK(r.p_f > 0.5);
}

TEST_CASE("Monte Carlo p-value") {
  CHECK_THROWS_AS(fisher_exact(CountTable::from_rows({{3, 1}, {1, 3}}), {FisherMethod::MonteCarlo, 0, 1}),
                  DomainError);

  std::mt19937_64 rng(37);
  for (int k = 0; k < 12; ++k) {
    const auto t = random_table(rng, 2 + k % 2, 3, 9);
    const auto exact = fisher_exact(t, {FisherMethod::Enumerate, 1, 0});
    const auto mc = fisher_exact(t, {FisherMethod::MonteCarlo, 20'000, static_cast<std::uint64_t>(k)});
    CHECK(mc.method == PValueMethod::MonteCarlo);
    const double se = std::max(mc.stderr_p, 1e-4);
    CHECK_MESSAGE(std::fabs(mc.p_f - exact.p_f) <= 3.0 * se, "table ", k);
  }

  const auto t = CountTable::from_rows({{6, 2, 1}, {1, 5, 3}});
  const auto a = fisher_exact(t, {FisherMethod::MonteCarlo, 5000, 9});
  const auto b = fisher_exact(t, {FisherMethod::MonteCarlo, 5000, 9});
  CHECK(a.p_f == b.p_f);
}

TEST_CASE("sample_fixed_margins frequencies") {
  constexpr int draws = 100'000;
  {
    const MarginSpec spec{{1, 1}, {1, 1}};
    int diagonal = 0;
    for (int s = 0; s < draws; ++s) {
      diagonal += sample_fixed_margins(spec, static_cast<std::uint64_t>(s)).at(0, 0);
    }
    CHECK(std::fabs(diagonal / double(draws) - 0.5) < 0.01);
  }
  {
    const MarginSpec spec{{4, 4}, {4, 4}};
    int centre = 0;
    for (int s = 0; s < draws; ++s) {
      centre += sample_fixed_margins(spec, static_cast<std::uint64_t>(s)).at(0, 0) == 2 ? 1 : 0;
    }
    CHECK(std::fabs(centre / double(draws) - 36.0 / 70.0) < 0.01);
  }
  {
    const MarginSpec spec{{3, 0, 4}, {2, 5}};
    for (int s = 0; s < 500; ++s) {
      const auto t = sample_fixed_margins(spec, static_cast<std::uint64_t>(s));
      CHECK(t.at(1, 0) == 0);
      CHECK(t.at(1, 1) == 0);
      CHECK(t.row_margins() == spec.row_margins);
      CHECK(t.col_margins() == spec.col_margins);
    }
  }
}

TEST_CASE("sample_fixed_margins cell means") {
  const MarginSpec spec{{7, 3, 10}, {4, 9, 2, 5}};
  const auto n = static_cast<double>(spec.total());
  constexpr int draws = 100'000;
  std::vector<double> sum(12, 0.0);
  SplitMix64 rng(99);
  for (int s = 0; s < draws; ++s) {
    const auto t = sample_fixed_margins(spec, rng);
    for (std::size_t k = 0; k < 12; ++k) sum[k] += static_cast<double>(t.cells()[k]);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double a = static_cast<double>(spec.row_margins[i]);
      const double b = static_cast<double>(spec.col_margins[j]);
      const double mean = a * b / n;
      // Variance of a single cell of the multivariate hypergeometric law.
      const double var = a * (b / n) * (1.0 - b / n) * (n - a) / (n - 1.0);
      const double se = std::sqrt(var / draws);
      CHECK(std::fabs(sum[i * 4 + j] / draws - mean) <= 3.0 * se);
    }
  }
}

TEST_CASE("sample_fixed_margins reproduces the exact table law") {
  const MarginSpec spec{{3, 2, 2}, {2, 3, 2}};
  std::map<std::vector<Count>, double> expected;
  for_each_table(spec, [&](std::span<const Count> c, double lp) { expected[{c.begin(), c.end()}] = std::exp(lp); });
  constexpr int draws = 200'000;
  std::map<std::vector<Count>, int> seen;
  SplitMix64 rng(5);
  for (int s = 0; s < draws; ++s) {
    const auto t = sample_fixed_margins(spec, rng);
    ++seen[{t.cells().begin(), t.cells().end()}];
  }
  for (const auto& [cells, p] : expected) {
    const double freq = seen[cells] / double(draws);
    const double se = std::sqrt(p * (1.0 - p) / draws);
    CHECK(std::fabs(freq - p) <= 4.0 * se + 1e-6);
  }
  CHECK(seen.size() <= expected.size());
}

TEST_CASE("sample_hypergeometric") {
  SplitMix64 rng(1);
  CHECK(sample_hypergeometric(0, 5, 10, rng) == 0);
  CHECK(sample_hypergeometric(10, 5, 10, rng) == 5);
  CHECK_THROWS_AS(sample_hypergeometric(11, 5, 10, rng), DomainError);

  const Count draws = 30, successes = 400, population = 1000;
  double total = 0.0;
  constexpr int reps = 50'000;
  for (int k = 0; k < reps; ++k) total += static_cast<double>(sample_hypergeometric(draws, successes, population, rng));
  const double mean = 30.0 * 0.4;
  const double var = 30.0 * 0.4 * 0.6 * (970.0 / 999.0);
  CHECK(std::fabs(total / reps - mean) <= 4.0 * std::sqrt(var / reps));
}

TEST_CASE("chi2_test examples") {
  const auto flat = chi2_test(CountTable::from_rows({{2, 2}, {2, 2}}));
  CHECK(flat.statistic == 0.0);
  CHECK(flat.p == 1.0);
  CHECK(flat.df == 1);

  const auto r = chi2_test(CountTable::from_rows({{3, 1}, {1, 3}}));
  CHECK(r.statistic == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.p == doctest::Approx(chi2_sf(2.0, 1)).epsilon(1e-14));
  CHECK(r.p == doctest::Approx(0.1573).epsilon(1e-3));

  // Diagonal-heavy 3x3 table against its 2x2 collapse (rows/cols 2 and 3 merged).
  const auto three = chi2_test(CountTable::from_rows({{5, 1, 1}, {1, 5, 1}, {1, 1, 5}}));
  const auto two = chi2_test(CountTable::from_rows({{5, 2}, {2, 12}}));
  CHECK(three.df == 4);
  CHECK(three.p < two.p);

  CHECK_THROWS_AS(chi2_test(CountTable::from_rows({{1, 0}, {2, 0}})), DomainError);
}

TEST_CASE("run_tests on degenerate tables") {
  const auto r = run_tests(CountTable::from_rows({{0, 3, 1}}));
  CHECK(r.fisher.p_f == 1.0);
  CHECK(r.p_h == 1.0);
  CHECK(r.chi2.p == 1.0);
  CHECK(r.mi.value == 0.0);

  const auto z = run_tests(CountTable::from_rows({{3, 0, 1}, {1, 0, 3}}));
  CHECK(z.fisher.p_f == doctest::Approx(34.0 / 70.0).epsilon(1e-14));
  CHECK(z.chi2.statistic == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("MarginSpec validation") {
  CHECK_THROWS_AS((MarginSpec{{1, 2}, {4}}).validate(), DomainError);
  CHECK_THROWS_AS((MarginSpec{{0}, {0}}).validate(), DomainError);
  CHECK_THROWS_AS((MarginSpec{{-1, 2}, {1}}).validate(), DomainError);
  CHECK_NOTHROW((MarginSpec{{0, 2}, {1, 1}}).validate());
}
