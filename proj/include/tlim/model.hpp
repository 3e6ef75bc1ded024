#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tlim/error.hpp"
#include "tlim/index.hpp"

namespace tlim {

enum class ModelFamily { Lognormal, Gamma, Pareto, PointMass };

constexpr std::string_view to_string(ModelFamily f) noexcept {
  switch (f) {
  case ModelFamily::Lognormal: return "lognormal";
  case ModelFamily::Gamma: return "gamma";
  case ModelFamily::Pareto: return "pareto";
  case ModelFamily::PointMass: return "pointmass";
  }
  return "?";
}

/// E|X^power * log(X)^log_power * exp(exp_rate * X)|, the shape every moment
/// condition in the family reduces to.
struct MomentTerm {
  double power = 0.0;
  int log_power = 0;
  double exp_rate = 0.0;
};

/// Absolute tolerance used for every population integral.
inline constexpr double quadrature_tolerance = 1e-10;

/// Parametric income model.
///
/// Integrals are evaluated on a log scale where the weight is smooth:
///   lognormal  X = exp(m + s u),  u ~ N(0,1)
///   gamma      X = scale * e^u,    w(u) = exp(k u - e^u) / Gamma(k)
///   pareto     X = xmin * e^u,     w(u) = beta exp(-beta u), u >= 0
class PopulationModel {
public:
  static PopulationModel lognormal(double log_mean, double log_sd) {
    if (!std::isfinite(log_mean) || !(log_sd > 0.0) || !std::isfinite(log_sd))
      throw Error(ErrorCode::InvalidArgument, "lognormal needs finite meanlog and sdlog > 0");
    return PopulationModel(ModelFamily::Lognormal, log_mean, log_sd);
  }
  static PopulationModel gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
      throw Error(ErrorCode::InvalidArgument, "gamma needs shape > 0 and scale > 0");
    return PopulationModel(ModelFamily::Gamma, shape, scale);
  }
  static PopulationModel pareto(double tail, double minimum) {
    if (!(tail > 0.0) || !(minimum > 0.0) || !std::isfinite(tail) || !std::isfinite(minimum))
      throw Error(ErrorCode::InvalidArgument, "pareto needs tail > 0 and minimum > 0");
    return PopulationModel(ModelFamily::Pareto, tail, minimum);
  }
  static PopulationModel point_mass(double atom) {
    if (!std::isfinite(atom) || atom == 0.0)
      throw Error(ErrorCode::InvalidArgument, "point mass needs a finite non-zero atom");
    return PopulationModel(ModelFamily::PointMass, atom, 0.0);
  }

  ModelFamily family() const noexcept { return family_; }
  /// lognormal: meanlog; gamma: shape; pareto: tail index; point mass: atom.
  double first() const noexcept { return p1_; }
  /// lognormal: sdlog; gamma: scale; pareto: minimum; point mass: unused.
  double second() const noexcept { return p2_; }

  double support_lower() const noexcept {
    switch (family_) {
    case ModelFamily::Pareto: return p2_;
    case ModelFamily::PointMass: return p1_;
    default: return 0.0;
    }
  }
  double support_upper() const noexcept {
    return family_ == ModelFamily::PointMass ? p1_ : std::numeric_limits<double>::infinity();
  }

  std::string name() const {
    using detail::format_real;
    switch (family_) {
    case ModelFamily::Lognormal:
      return "lognormal(meanlog=" + format_real(p1_) + ",sdlog=" + format_real(p2_) + ")";
    case ModelFamily::Gamma:
      return "gamma(shape=" + format_real(p1_) + ",scale=" + format_real(p2_) + ")";
    case ModelFamily::Pareto:
      return "pareto(tail=" + format_real(p1_) + ",min=" + format_real(p2_) + ")";
    case ModelFamily::PointMass: return "pointmass(" + format_real(p1_) + ")";
    }
    return "?";
  }

  /// Closed-form E X^r; +inf when the moment does not exist.
  double power_moment(double r) const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (family_) {
    case ModelFamily::Lognormal: return std::exp(r * p1_ + 0.5 * r * r * p2_ * p2_);
    case ModelFamily::Gamma:
      if (p1_ + r <= 0.0)
        return inf;
      return std::pow(p2_, r) * std::exp(std::lgamma(p1_ + r) - std::lgamma(p1_));
    case ModelFamily::Pareto:
      if (r >= p1_)
        return inf;
      return p1_ * std::pow(p2_, r) / (p1_ - r);
    case ModelFamily::PointMass: return std::pow(p1_, r);
    }
    return NAN;
  }

  double mean() const { return power_moment(1.0); }

  /// Analytic existence rule for E|X^p log^q X e^{cX}|.
  bool moment_exists(const MomentTerm &m) const noexcept {
    switch (family_) {
    case ModelFamily::PointMass: return true;
    case ModelFamily::Lognormal: return m.exp_rate <= 0.0;
    case ModelFamily::Gamma:
      // Near 0 the density behaves like x^{k-1}; log factors do not matter
      // once the power is integrable. Upper tail: exp(-x/scale).
      return m.power + p1_ > 0.0 && m.exp_rate < 1.0 / p2_;
    case ModelFamily::Pareto:
      if (m.exp_rate < 0.0)
        return true;
      if (m.exp_rate > 0.0)
        return false;
      return m.power < p1_;
    }
    return false;
  }

  /// E g(X) by adaptive Gauss-Kronrod quadrature. Throws QuadratureFailure
  /// when the error estimate exceeds the tolerance (scaled by max(1, L1)).
  template <class G> double expectation(G &&g) const {
    using boost::math::quadrature::gauss_kronrod;
    if (family_ == ModelFamily::PointMass)
      return checked(g(p1_));

    double error = 0.0, l1 = 0.0, value = 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    switch (family_) {
    case ModelFamily::Lognormal: {
      const double m = p1_, s = p2_;
      auto f = [&](double u) {
        const double w = std::exp(-0.5 * u * u) * 0.3989422804014327;
        return w == 0.0 ? 0.0 : checked(g(std::exp(m + s * u))) * w;
      };
      value = gauss_kronrod<double, 61>::integrate(f, -inf, inf, 20, 1e-13, &error, &l1);
      break;
    }
    case ModelFamily::Gamma: {
      const double k = p1_, scale = p2_, lg = std::lgamma(p1_);
      auto f = [&](double u) {
        const double w = std::exp(k * u - std::exp(u) - lg);
        return w == 0.0 ? 0.0 : checked(g(scale * std::exp(u))) * w;
      };
      value = gauss_kronrod<double, 61>::integrate(f, -inf, inf, 20, 1e-13, &error, &l1);
      break;
    }
    case ModelFamily::Pareto: {
      const double beta = p1_, xmin = p2_;
      auto f = [&](double u) {
        const double w = beta * std::exp(-beta * u);
        return w == 0.0 ? 0.0 : checked(g(xmin * std::exp(u))) * w;
      };
      value = gauss_kronrod<double, 61>::integrate(f, 0.0, inf, 20, 1e-13, &error, &l1);
      break;
    }
    case ModelFamily::PointMass: break;
    }
    if (!std::isfinite(value) || !(error <= quadrature_tolerance * std::max(1.0, l1)))
      throw Error(ErrorCode::QuadratureFailure,
                  name() + ": quadrature error estimate " + detail::format_real(error));
    return value;
  }

  /// Quadrature self-check: total mass, should be 1 within the tolerance.
  double total_mass() const {
    return expectation([](double) { return 1.0; });
  }

  friend bool operator==(const PopulationModel &, const PopulationModel &) = default;

private:
  PopulationModel(ModelFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  static double checked(double v) {
    if (!std::isfinite(v))
      throw Error(ErrorCode::NonFiniteMoment, "integrand is not finite");
    return v;
  }

  ModelFamily family_;
  double p1_;
  double p2_;
};

} // namespace tlim
