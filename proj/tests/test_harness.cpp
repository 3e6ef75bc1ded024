#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "support.hpp"

using namespace tlim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

TEST_CASE("moment feasibility") {
  const IndexSpec ge2 = catalog(IndexKind::GeneralizedEntropy, 2.0);
  const auto bad = moment_feasibility(PopulationModel::pareto(3.0, 1.0), ge2);
  CHECK_FALSE(bad.feasible());
  CHECK(bad.consistent());
  CHECK(bad.missing().find("X^4") != std::string::npos);
  CHECK(moment_feasibility(PopulationModel::pareto(5.0, 1.0), ge2).feasible());
  CHECK(moment_feasibility(PopulationModel::lognormal(0, 1), catalog(IndexKind::Theil)).feasible());
  CHECK(moment_feasibility(PopulationModel::lognormal(0, 1), catalog(IndexKind::Kolm, 2.0)).feasible());
  CHECK_FALSE(
      moment_feasibility(PopulationModel::pareto(0.8, 1.0), catalog(IndexKind::MLD)).consistent());
}

TEST_CASE("draw is a pure function of its inputs") {
  const auto m = PopulationModel::gamma(2.0, 3.0);
  const Sample a = draw(m, 500, 42), b = draw(m, 500, 42), c = draw(m, 500, 43);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  const Sample p = draw(PopulationModel::point_mass(2.5), 10, 1);
  CHECK(p.values().front() == 2.5);
  CHECK(p.values().back() == 2.5);
}

TEST_CASE("generator pins") {
  // SplitMix64 reference outputs for seed 0 (state advanced by gamma first).
  CounterRng r(0);
  CHECK(r.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(r.next_u64() == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("draw matches model moments") {
  for (const auto &m : {PopulationModel::lognormal(0.2, 0.5), PopulationModel::gamma(3.0, 2.0),
                        PopulationModel::pareto(6.0, 1.5)}) {
    const Sample s = draw(m, 200000, 9);
    INFO(m.name());
    CHECK_THAT(s.mean(), WithinRel(m.mean(), 0.01));
  }
}

TEST_CASE("population truth") {
  const auto pm = PopulationModel::point_mass(4.0);
  for (const auto &spec : support::index_panel()) {
    const auto t = population_truth(pm, spec);
    CHECK(std::fabs(t.T) <= 1e-12);
    CHECK(std::fabs(t.sigma2) <= 1e-12);
  }
  const auto ln = PopulationModel::lognormal(0.0, 0.5);
  const auto theil = population_truth(ln, catalog(IndexKind::Theil));
  const auto mld = population_truth(ln, catalog(IndexKind::MLD));
  CHECK_THAT(theil.T, WithinAbs(0.125, 1e-10));
  CHECK_THAT(mld.T, WithinAbs(0.125, 1e-10));
  // Independent high-precision quadrature values.
  CHECK_THAT(theil.sigma2, WithinRel(0.04327065105878996, 1e-8));
  CHECK_THAT(mld.sigma2, WithinRel(0.03402541668774148, 1e-8));
  // Pareto(5, 1), GE(2): E X^r = 5/(5-r) gives sigma^2 = 0.25 (4/5)^4 (20/27).
  const auto p5 = population_truth(PopulationModel::pareto(5.0, 1.0),
                                   catalog(IndexKind::GeneralizedEntropy, 2.0));
  CHECK_THAT(p5.T, WithinRel(1.0 / 30.0, 1e-9));
  CHECK_THAT(p5.sigma2, WithinRel(0.25 * 0.4096 * 20.0 / 27.0, 1e-8));
  CHECK_THROWS_AS(population_truth(PopulationModel::pareto(3.0, 1.0),
                                   catalog(IndexKind::GeneralizedEntropy, 2.0)),
                  Error);
}

TEST_CASE("empirical process is linear") {
  const auto m = PopulationModel::lognormal(0.0, 0.5);
  const Sample s = draw(m, 1000, 5);
  auto f = [](double x) { return std::log(x); };
  auto g = [](double x) { return x * x; };
  const double lhs = empirical_process(s.values(), [&](double x) { return 2.0 * f(x) - 3.0 * g(x); }, m);
  const double rhs = 2.0 * empirical_process(s.values(), f, m) - 3.0 * empirical_process(s.values(), g, m);
  CHECK_THAT(lhs, WithinAbs(rhs, 1e-9));
}

TEST_CASE("replicates are deterministic and independent of threading") {
  const auto m = PopulationModel::lognormal(0.0, 0.5);
  const IndexSpec spec = catalog(IndexKind::Theil);
  const SimReport a = run_replicates(m, spec, 200, 300, 0.95, 77);
  const SimReport b = run_replicates(m, spec, 200, 300, 0.95, 77, {4, false});
  CHECK(a.coverage == b.coverage);
  CHECK(a.ks_distance == b.ks_distance);
  CHECK(a.variance_ratio == b.variance_ratio);
  CHECK(a.mean_bias == b.mean_bias);
  CHECK(a.standardized == b.standardized);
  const SimReport c = run_replicates(m, spec, 200, 300, 0.95, 78);
  CHECK(a.standardized != c.standardized);
  CHECK_THROWS_AS(run_replicates(m, spec, 200, 99, 0.95, 1), Error);
}

TEST_CASE("point-mass simulation is flagged degenerate") {
  const SimReport r =
      run_replicates(PopulationModel::point_mass(2.0), catalog(IndexKind::MLD), 50, 100, 0.95, 3);
  CHECK(r.degenerate);
  CHECK(r.coverage == 1.0);
  CHECK(r.mean_abs_error == 0.0);
}

TEST_CASE("infeasible models are refused unless forced") {
  const auto p3 = PopulationModel::pareto(3.0, 1.0);
  const IndexSpec ge2 = catalog(IndexKind::GeneralizedEntropy, 2.0);
  try {
    run_replicates(p3, ge2, 100, 100, 0.95, 1);
    FAIL("expected InfeasibleMoments");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::InfeasibleMoments);
    CHECK(std::string(e.what()).find("X^4") != std::string::npos);
  }
  CHECK_THROWS_AS(consistency_sweep(p3, ge2, {100, 1000}, 10, 1), Error);
  const SimReport forced = run_replicates(p3, ge2, 100, 100, 0.95, 1, {1, true});
  CHECK_FALSE(forced.feasible);
}

TEST_CASE("normal approximation improves with n") {
  const auto m = PopulationModel::lognormal(0.0, 0.5);
  const IndexSpec spec = catalog(IndexKind::Theil);
  std::vector<double> small, large;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small.push_back(run_replicates(m, spec, 50, 2000, 0.95, seed).ks_distance);
    large.push_back(run_replicates(m, spec, 2000, 2000, 0.95, seed).ks_distance);
  }
  CHECK(median(small) > median(large));
}

TEST_CASE("consistency sweep") {
  const std::vector<std::size_t> grid = {100, 1000, 10000};
  for (const auto &[model, spec] :
       {std::pair{PopulationModel::lognormal(0.0, 0.5), catalog(IndexKind::Theil)},
        std::pair{PopulationModel::gamma(2.0, 1.0), catalog(IndexKind::MLD)}}) {
    std::vector<std::vector<double>> err(grid.size());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto rows = consistency_sweep(model, spec, grid, 50, seed);
      for (std::size_t g = 0; g < grid.size(); ++g)
        err[g].push_back(rows[g].mean_abs_error);
    }
    for (std::size_t g = 1; g < grid.size(); ++g)
      CHECK(median(err[g]) < median(err[g - 1]));
  }
  const auto zero = consistency_sweep(PopulationModel::point_mass(3.0), catalog(IndexKind::Theil),
                                      {10, 100}, 5, 1);
  for (const auto &r : zero)
    CHECK(r.mean_abs_error <= 1e-12);
  CHECK_THROWS_AS(consistency_sweep(PopulationModel::point_mass(3.0), catalog(IndexKind::Theil),
                                    {100, 10}, 5, 1),
                  Error);
}

TEST_CASE("histogram counts every value") {
  const std::vector<double> zs = {-5.0, -0.1, 0.0, 0.2, 3.9, 10.0};
  const auto bins = normal_histogram(zs, -4.0, 4.0, 8);
  std::size_t total = 0;
  double expected = 0.0;
  for (const auto &b : bins) {
    total += b.count;
    expected += b.expected;
  }
  CHECK(total == zs.size());
  CHECK_THAT(expected, WithinAbs(6.0, 1e-12));
  CHECK(bins.front().count == 1);
  CHECK(bins.back().count == 2);
}

TEST_CASE("KS distance") {
  CHECK_THAT(ks_distance_normal({0.0}), WithinAbs(0.5, 1e-15));
  std::vector<double> zs;
  for (int i = 1; i < 1000; ++i)
    zs.push_back(boost::math::quantile(boost::math::normal_distribution<double>(), i / 1000.0));
  CHECK(ks_distance_normal(zs) <= 1.001e-3);
}
