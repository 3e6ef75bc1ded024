#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tlim/error.hpp"
#include "tlim/index.hpp"
#include "tlim/summation.hpp"

namespace tlim {

enum class ValueDomain {
  Positive, ///< log/power kernels: every observation > 0
  Real,     ///< Kolm: any finite value
};

constexpr ValueDomain domain_of(IndexKind kind) noexcept {
  return requires_positive_values(kind) ? ValueDomain::Positive : ValueDomain::Real;
}

/// A validated sample of observations with its cached empirical mean.
///
/// Values are stored in ascending order: observation order carries no
/// information for any index in the family, and a canonical order makes
/// every downstream sum exactly permutation invariant.
class Sample {
public:
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double mean() const noexcept { return mean_; }
  ValueDomain domain() const noexcept { return domain_; }

private:
  friend Sample make_sample(std::vector<double> values, ValueDomain domain);

  Sample(std::vector<double> values, double mean, ValueDomain domain)
      : values_(std::move(values)), mean_(mean), domain_(domain) {}

  std::vector<double> values_;
  double mean_;
  ValueDomain domain_;
};

inline Sample make_sample(std::vector<double> values, ValueDomain domain) {
  if (values.empty())
    throw Error(ErrorCode::EmptySample, "sample has no observations");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v))
      throw Error(ErrorCode::DomainViolation,
                  "non-finite observation at position " + std::to_string(i), i);
    if (domain == ValueDomain::Positive && !(v > 0.0))
      throw Error(ErrorCode::NonPositiveValue,
                  "observation " + std::to_string(i) + " is not positive", i);
  }
  std::sort(values.begin(), values.end());
  const double mean = compensated_mean(values);
  if (mean == 0.0)
    throw Error(ErrorCode::ZeroMean, "sample mean is zero");
  return Sample(std::move(values), mean, domain);
}

inline Sample make_sample(std::vector<double> values, IndexKind kind) {
  return make_sample(std::move(values), domain_of(kind));
}

/// Checks that `sample` was validated for a domain at least as strict as the
/// one `spec` needs.
inline void require_domain(const Sample &sample, const IndexSpec &spec) {
  if (sample.domain() == ValueDomain::Real && requires_positive_values(spec.kind()) &&
      sample.values().front() <= 0.0)
    throw Error(ErrorCode::NonPositiveValue,
                spec.name() + " needs positive observations");
}

} // namespace tlim
