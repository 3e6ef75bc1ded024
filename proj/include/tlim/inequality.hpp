#pragma once

#include <cmath>
#include <string>

#include "tlim/error.hpp"
#include "tlim/index.hpp"
#include "tlim/sample.hpp"
#include "tlim/summation.hpp"

namespace tlim {

namespace detail {

// Kolm: (1/alpha) log((1/n) sum exp(-alpha (x_j - mu))) with the largest
// exponent factored out, so nothing overflows for |alpha x| up to ~700.
inline double kolm_index(double alpha, const Sample &sample) {
  const auto xs = sample.values();
  const double mu = sample.mean();
  // Values are sorted ascending and alpha > 0, so the largest exponent
  // belongs to the smallest observation.
  const double top = -alpha * (xs.front() - mu);
  CompensatedSum s;
  for (double x : xs)
    s += std::exp(-alpha * (x - mu) - top);
  const double log_mean = top + std::log(s.value() / static_cast<double>(xs.size()));
  return log_mean / alpha;
}

} // namespace detail

/// Argument handed to tau by the empirical index:
/// (1/n) sum h(X_j) / h1(mu_n) - h2(mu_n).
inline double index_argument(const IndexSpec &spec, const Sample &sample) {
  require_domain(sample, spec);
  const double mu = sample.mean();
  const double h1 = spec.h1(mu);
  if (h1 == 0.0 || !std::isfinite(h1))
    throw Error(ErrorCode::DomainViolation, spec.name() + ": h1(mean) is zero or not finite");
  CompensatedSum s;
  for (double x : sample.values())
    s += spec.h(x);
  const double b = s.value() / static_cast<double>(sample.size());
  return b / h1 - spec.h2(mu);
}

/// Empirical index T_n(phi, X).
inline double eval_index(const IndexSpec &spec, const Sample &sample) {
  if (spec.kind() == IndexKind::Kolm) {
    require_domain(sample, spec);
    const double v = detail::kolm_index(*spec.alpha(), sample);
    if (!std::isfinite(v))
      throw Error(ErrorCode::DomainViolation, spec.name() + ": index is not finite");
    return v;
  }
  const double t = index_argument(spec, sample);
  if (!spec.tau_defined_at(t))
    throw Error(ErrorCode::DomainViolation,
                spec.name() + ": tau argument " + detail::format_real(t) + " outside its domain");
  const double v = spec.tau(t);
  if (!std::isfinite(v))
    throw Error(ErrorCode::DomainViolation, spec.name() + ": index is not finite");
  return v;
}

} // namespace tlim
