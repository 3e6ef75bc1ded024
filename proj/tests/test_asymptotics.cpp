#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace tlim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("plugin moments") {
  const Sample s = make_sample({1.0, 3.0}, ValueDomain::Positive);
  CHECK_THAT(plugin_moments(catalog(IndexKind::Theil), s).B_h, WithinAbs(1.6479184330021646, 1e-14));
  CHECK_THAT(plugin_moments(catalog(IndexKind::MLD), s).B_h, WithinAbs(-0.5493061443340548, 1e-14));

  const auto c = plugin_moments(catalog(IndexKind::Theil),
                                make_sample({2.5, 2.5, 2.5, 2.5}, ValueDomain::Positive));
  CHECK(c.var_h == 0.0);
  CHECK(c.var_x == 0.0);
  CHECK(c.cov_hx == 0.0);

  const auto m = plugin_moments(catalog(IndexKind::GeneralizedEntropy, 2.0), s);
  CHECK_THAT(m.var_x, WithinAbs(1.0, 1e-15));
  CHECK_THAT(m.var_h, WithinAbs(16.0, 1e-13));
  CHECK_THAT(m.cov_hx, WithinAbs(4.0, 1e-14));
}

TEST_CASE("influence profiles") {
  for (double mu : {0.5, 2.0, 7.0}) {
    const auto p = influence_profile(catalog(IndexKind::MLD), mu, -0.3);
    CHECK(p.a_phi == 1.0);
    CHECK_THAT(p.b_phi, WithinRel(-1.0 / mu, 1e-15));
  }
  const auto t = influence_profile(catalog(IndexKind::Theil), 2.0, 1.6479184330021646);
  CHECK(t.a_phi == 0.5);
  CHECK_THAT(t.b_phi, WithinAbs(0.9119796082505411, 1e-14));
  CHECK_THAT(influence_eval(t, catalog(IndexKind::Theil), 1.0), WithinAbs(-0.9119796082505411, 1e-14));

  for (double a : {0.3, 1.0, 2.5})
    for (double B : {0.01, 0.4, 3.0}) {
      const auto k = influence_profile(catalog(IndexKind::Kolm, a), 1.7, B);
      CHECK_THAT(k.b_phi, WithinAbs(-1.0, 1e-15));
    }

  const auto mld = influence_profile(catalog(IndexKind::MLD), 2.0, -0.5);
  CHECK_THAT(influence_eval(mld, catalog(IndexKind::MLD), 2.0), WithinAbs(0.3068528194400547, 1e-15));
  CHECK_THROWS_AS(influence_eval(mld, catalog(IndexKind::MLD), -1.0), Error);
  // ATK at a negative tau argument is outside the differentiable domain.
  CHECK_THROWS_AS(influence_profile(catalog(IndexKind::Atkinson, 0.5), 1.0, -1.0), Error);
}

TEST_CASE("variance identities") {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const Sample s = support::lognormal_sample(i);
    for (const auto &spec : support::index_panel()) {
      INFO(spec.name() << " sample " << i);
      const double v = variance_plugin(spec, s);
      CHECK_THAT(variance_three_term(spec, s), WithinRel(v, 1e-8));
      CHECK_THAT(referee_variance(spec, s), WithinRel(v, 1e-10));
    }
  }
}

TEST_CASE("variance on the two-point sample") {
  const Sample s = make_sample({1.0, 3.0}, ValueDomain::Positive);
  CHECK_THAT(variance_plugin(catalog(IndexKind::Theil), s), WithinRel(0.007747589363728206, 1e-12));
  for (const auto &spec : support::index_panel())
    CHECK(variance_plugin(spec, make_sample({5.0, 5.0, 5.0}, ValueDomain::Positive)) == 0.0);
}

TEST_CASE("estimate and confidence interval") {
  const Sample s = make_sample({1.0, 3.0}, ValueDomain::Positive);
  const Estimate e = estimate(catalog(IndexKind::Theil), s, 0.95);
  CHECK_THAT(e.ci_high - e.ci_low,
             WithinRel(2.0 * 1.959963984540054 * std::sqrt(e.sigma2 / 2.0), 1e-12));
  CHECK(e.value == eval_index(catalog(IndexKind::Theil), s));
  CHECK_FALSE(e.degenerate);

  const Estimate c = estimate(catalog(IndexKind::MLD), make_sample({2.0, 2.0}, ValueDomain::Positive));
  CHECK(c.ci_low == 0.0);
  CHECK(c.ci_high == 0.0);
  CHECK(c.degenerate);

  CHECK_THAT(normal_critical_value(0.95), WithinAbs(1.959963984540054, 1e-14));
  CHECK_THROWS_AS(estimate(catalog(IndexKind::MLD), s, 1.0), Error);
}

TEST_CASE("compare") {
  const Sample s = support::lognormal_sample(3);
  const Estimate e = estimate(catalog(IndexKind::Theil), s);
  const Comparison c = compare(e, e);
  CHECK(c.difference == 0.0);
  CHECK(c.z == 0.0);
  CHECK(c.p_value == 1.0);

  const Estimate a = make_estimate(catalog(IndexKind::Theil), 0.43102, 4.371e-4, 6565, 0.95);
  const Estimate b = make_estimate(catalog(IndexKind::Theil), 0.24007, 0.411e-4, 13568, 0.95);
  const Comparison d = compare(a, b);
  CHECK(d.z > 0.0);
  CHECK(d.p_value < 1e-10);

  CHECK_THROWS_AS(compare(a, estimate(catalog(IndexKind::MLD), s)), Error);
}
