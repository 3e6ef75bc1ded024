#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace tlim {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }

  CompensatedSum &operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_mean(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs)
    s += x;
  return s.value() / static_cast<double>(xs.size());
}

/// Streaming (Welford-style) accumulator for two variables: means, 1/n
/// centered second moments and the co-moment.
class CoMoments {
public:
  void add(double u, double v) noexcept {
    ++n_;
    const double k = static_cast<double>(n_);
    const double du = u - mean_u_;
    const double dv = v - mean_v_;
    mean_u_ += du / k;
    mean_v_ += dv / k;
    m2_u_ += du * (u - mean_u_);
    m2_v_ += dv * (v - mean_v_);
    c_uv_ += du * (v - mean_v_);
  }

  std::size_t count() const noexcept { return n_; }
  double mean_u() const noexcept { return mean_u_; }
  double mean_v() const noexcept { return mean_v_; }
  double var_u() const noexcept { return n_ ? m2_u_ / static_cast<double>(n_) : 0.0; }
  double var_v() const noexcept { return n_ ? m2_v_ / static_cast<double>(n_) : 0.0; }
  double cov_uv() const noexcept { return n_ ? c_uv_ / static_cast<double>(n_) : 0.0; }

private:
  std::size_t n_ = 0;
  double mean_u_ = 0.0, mean_v_ = 0.0;
  double m2_u_ = 0.0, m2_v_ = 0.0, c_uv_ = 0.0;
};

/// 1/n-weighted variance, two-pass with a compensated mean.
inline double population_variance(std::span<const double> xs) noexcept {
  if (xs.empty())
    return 0.0;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); }))
    return 0.0;
  const double m = compensated_mean(xs);
  CompensatedSum s;
  for (double x : xs) {
    const double d = x - m;
    s += d * d;
  }
  return s.value() / static_cast<double>(xs.size());
}

} // namespace tlim
