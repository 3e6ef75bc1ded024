#pragma once

#include <cmath>

#include "tlim/asymptotics.hpp"
#include "tlim/error.hpp"
#include "tlim/feasibility.hpp"
#include "tlim/index.hpp"
#include "tlim/model.hpp"

namespace tlim {

namespace detail {

inline double population_B(const IndexSpec &spec, const PopulationModel &model) {
  const auto checks = required_moments(spec);
  for (const auto &c : checks)
    if (c.purpose == MomentPurpose::Consistency && !model.moment_exists(c.term))
      throw Error(ErrorCode::NonFiniteMoment, model.name() + ": " + c.label + " is infinite");
  return model.expectation([&](double x) { return spec.h(x); });
}

} // namespace detail

/// Population index T(phi, X) = tau(B_h / h1(mu) - h2(mu)), with mu in closed
/// form and B_h = E h(X) by quadrature.
inline double eval_population(const IndexSpec &spec, const PopulationModel &model) {
  const double mu = model.mean();
  if (!std::isfinite(mu))
    throw Error(ErrorCode::NonFiniteMoment, model.name() + ": mean is infinite");
  const double B = detail::population_B(spec, model);
  const double h1 = spec.h1(mu);
  if (h1 == 0.0 || !std::isfinite(h1))
    throw Error(ErrorCode::DomainViolation, spec.name() + ": h1(mu) is zero or not finite");
  const double t = B / h1 - spec.h2(mu);
  if (!spec.tau_defined_at(t))
    throw Error(ErrorCode::DomainViolation, spec.name() + ": tau argument outside its domain");
  return spec.tau(t);
}

struct PopulationTruth {
  double T = 0.0;
  double sigma2 = 0.0;
  InfluenceProfile profile;
};

/// T and sigma^2 = E (F(X) - E F(X))^2 at the model, by quadrature.
inline PopulationTruth population_truth(const PopulationModel &model, const IndexSpec &spec) {
  const auto verdict = moment_feasibility(model, spec);
  if (!verdict.feasible())
    throw Error(ErrorCode::InfeasibleMoments,
                spec.name() + " under " + model.name() + " needs " + verdict.missing());
  PopulationTruth out;
  out.T = eval_population(spec, model);
  const double mu = model.mean();
  out.profile = influence_profile(spec, mu, detail::population_B(spec, model));
  const auto &p = out.profile;
  auto F = [&](double x) { return p.a_phi * spec.h(x) - p.b_phi * x; };
  const double mean_F = model.expectation(F);
  out.sigma2 = model.expectation([&](double x) {
    const double d = F(x) - mean_F;
    return d * d;
  });
  return out;
}

/// G_n(f) = sqrt(n) (P_n f - P f), the model supplying P.
template <class G>
double empirical_process(std::span<const double> xs, G &&f, const PopulationModel &model) {
  CompensatedSum s;
  for (double x : xs)
    s += f(x);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(n) * (s.value() / n - model.expectation(f));
}

} // namespace tlim
