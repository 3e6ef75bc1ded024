#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "tlim/error.hpp"
#include "tlim/index.hpp"
#include "tlim/inequality.hpp"
#include "tlim/sample.hpp"
#include "tlim/summation.hpp"

namespace tlim {

/// Plug-in moments, all with 1/n weights.
struct MomentSet {
  std::size_t n = 0;
  double mean = 0.0;   ///< mu_n
  double B_h = 0.0;    ///< (1/n) sum h(X_j)
  double var_h = 0.0;  ///< Var_n h(X)
  double var_x = 0.0;  ///< Var_n X
  double cov_hx = 0.0; ///< Cov_n(h(X), X)
};

/// Single streaming pass over the sample.
inline MomentSet plugin_moments(const IndexSpec &spec, const Sample &sample) {
  require_domain(sample, spec);
  CoMoments acc;
  CompensatedSum bh;
  for (double x : sample.values()) {
    const double hx = spec.h(x);
    if (!std::isfinite(hx))
      throw Error(ErrorCode::NonFiniteMoment, spec.name() + ": h(x) not finite at x=" +
                                                  detail::format_real(x));
    acc.add(hx, x);
    bh += hx;
  }
  MomentSet m;
  m.n = sample.size();
  m.mean = sample.mean();
  m.B_h = bh.value() / static_cast<double>(m.n);
  m.var_h = acc.var_u();
  m.var_x = acc.var_v();
  m.cov_hx = acc.cov_uv();
  return m;
}

/// Coefficients of the influence function F(x) = a h(x) - b x.
struct InfluenceProfile {
  double B_h = 0.0;
  double mu = 0.0;
  double K_phi = 0.0;
  double a_phi = 0.0;
  double b_phi = 0.0;
};

/// K = tau'(B_h/h1(mu) - h2(mu)), a = K/h1(mu),
/// b = K (B_h h1'(mu)/h1(mu)^2 + h2'(mu)).
inline InfluenceProfile influence_profile(const IndexSpec &spec, double mu, double B_h) {
  const double h1 = spec.h1(mu);
  if (h1 == 0.0 || !std::isfinite(h1))
    throw Error(ErrorCode::DegenerateKernel, spec.name() + ": h1(mu) is zero or not finite");
  const double t = B_h / h1 - spec.h2(mu);
  if (!spec.tau_defined_at(t))
    throw Error(ErrorCode::DomainViolation,
                spec.name() + ": tau not differentiable at " + detail::format_real(t));
  InfluenceProfile p;
  p.B_h = B_h;
  p.mu = mu;
  p.K_phi = spec.tau_prime(t);
  if (!std::isfinite(p.K_phi))
    throw Error(ErrorCode::NonFiniteK, spec.name() + ": K_phi is not finite");
  p.a_phi = p.K_phi / h1;
  p.b_phi = p.K_phi * (B_h * spec.h1_prime(mu) / (h1 * h1) + spec.h2_prime(mu));
  if (!std::isfinite(p.a_phi) || !std::isfinite(p.b_phi))
    throw Error(ErrorCode::NonFiniteK, spec.name() + ": influence coefficients not finite");
  return p;
}

inline double influence_eval(const InfluenceProfile &p, const IndexSpec &spec, double x) {
  if (!std::isfinite(x) || (requires_positive_values(spec.kind()) && !(x > 0.0)))
    throw Error(ErrorCode::DomainViolation,
                spec.name() + ": x=" + detail::format_real(x) + " outside the kernel domain");
  return p.a_phi * spec.h(x) - p.b_phi * x;
}

/// Plug-in influence profile (mu_n, B_{h,n}).
inline InfluenceProfile plugin_profile(const IndexSpec &spec, const Sample &sample) {
  const MomentSet m = plugin_moments(spec, sample);
  return influence_profile(spec, m.mean, m.B_h);
}

namespace detail {

struct InfluenceValues {
  InfluenceProfile profile;
  std::vector<double> values;
};

// Influence values at plug-in parameters. For Kolm the data are centred at
// mu_n first: F only shifts by a constant under translation, and centring
// keeps exp(-alpha x) representable for large incomes.
inline InfluenceValues plugin_influence_values(const IndexSpec &spec, const Sample &sample) {
  require_domain(sample, spec);
  const auto xs = sample.values();
  const double shift = spec.kind() == IndexKind::Kolm ? sample.mean() : 0.0;
  CompensatedSum bh;
  for (double x : xs) {
    const double hx = spec.h(x - shift);
    if (!std::isfinite(hx))
      throw Error(ErrorCode::NonFiniteMoment, spec.name() + ": h(x) not finite");
    bh += hx;
  }
  const double mu = spec.kind() == IndexKind::Kolm ? 0.0 : sample.mean();
  InfluenceValues out;
  out.profile = influence_profile(spec, mu, bh.value() / static_cast<double>(xs.size()));
  out.values.reserve(xs.size());
  for (double x : xs)
    out.values.push_back(out.profile.a_phi * spec.h(x - shift) - out.profile.b_phi * (x - shift));
  return out;
}

} // namespace detail

/// Plug-in asymptotic variance: the 1/n-weighted variance of the influence
/// values F(X_i). The expanded three-term form lives in closed_forms.hpp.
inline double variance_plugin(const IndexSpec &spec, const Sample &sample) {
  const auto iv = detail::plugin_influence_values(spec, sample);
  if (iv.profile.K_phi == 0.0)
    return 0.0;
  return population_variance(iv.values);
}

/// a^2 Var h + b^2 Var X - 2ab Cov(h, X) at plug-in moments.
inline double variance_three_term(const IndexSpec &spec, const Sample &sample) {
  const MomentSet m = plugin_moments(spec, sample);
  const InfluenceProfile p = influence_profile(spec, m.mean, m.B_h);
  return p.a_phi * p.a_phi * m.var_h + p.b_phi * p.b_phi * m.var_x -
         2.0 * p.a_phi * p.b_phi * m.cov_hx;
}

/// Two-sided standard normal quantile z((1+level)/2).
inline double normal_critical_value(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
}

struct Estimate {
  IndexSpec spec;
  double value = 0.0;  ///< T_n
  double sigma2 = 0.0; ///< plug-in asymptotic variance
  double std_error = 0.0; ///< sqrt(sigma2 / n)
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t n = 0;
  /// Set when K_phi = 0 or the influence values are constant; the interval
  /// then has zero width.
  bool degenerate = false;
};

/// Builds an estimate from its primary quantities; stderr and the interval
/// are derived.
inline Estimate make_estimate(const IndexSpec &spec, double value, double sigma2, std::size_t n,
                              double level, bool degenerate = false) {
  const double z = normal_critical_value(level);
  Estimate e{spec};
  e.value = value;
  e.sigma2 = sigma2;
  e.n = n;
  e.level = level;
  e.std_error = std::sqrt(sigma2 / static_cast<double>(n));
  e.ci_low = value - z * e.std_error;
  e.ci_high = value + z * e.std_error;
  e.degenerate = degenerate || sigma2 == 0.0;
  return e;
}

/// Point estimate, plug-in variance and normal-approximation interval.
inline Estimate estimate(const IndexSpec &spec, const Sample &sample, double level = 0.95) {
  normal_critical_value(level);
  const double value = eval_index(spec, sample);
  const auto iv = detail::plugin_influence_values(spec, sample);
  const bool flat = iv.profile.K_phi == 0.0;
  const double sigma2 = flat ? 0.0 : population_variance(iv.values);
  return make_estimate(spec, value, sigma2, sample.size(), level, flat);
}

struct Comparison {
  double difference = 0.0; ///< A - B
  double std_error = 0.0;    ///< sqrt(s2A/nA + s2B/nB)
  double z = 0.0;
  double p_value = 1.0; ///< two-sided
};

/// Normal test for the difference of two estimates from independent samples.
inline Comparison compare(const Estimate &a, const Estimate &b) {
  if (!(a.spec == b.spec))
    throw Error(ErrorCode::SpecMismatch, a.spec.name() + " vs " + b.spec.name());
  Comparison c;
  c.difference = a.value - b.value;
  c.std_error = std::sqrt(a.sigma2 / static_cast<double>(a.n) + b.sigma2 / static_cast<double>(b.n));
  if (c.std_error > 0.0) {
    c.z = c.difference / c.std_error;
    c.p_value = std::erfc(std::fabs(c.z) / std::numbers::sqrt2);
  } else if (c.difference != 0.0) {
    c.z = std::copysign(INFINITY, c.difference);
    c.p_value = 0.0;
  }
  return c;
}

} // namespace tlim
