#pragma once

// Per-index variance and influence formulas written out member by member,
// kept independent of the general influence machinery in asymptotics.hpp so
// the two can referee each other.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tlim/asymptotics.hpp"
#include "tlim/error.hpp"
#include "tlim/index.hpp"
#include "tlim/sample.hpp"
#include "tlim/summation.hpp"

namespace tlim {

/// Raw plug-in moment (1/n) sum g(X_j), compensated.
template <class G> double raw_moment(const Sample &sample, G &&g) {
  CompensatedSum s;
  for (double x : sample.values()) {
    const double v = g(x);
    if (!std::isfinite(v))
      throw Error(ErrorCode::NonFiniteMoment, "moment term not finite at x=" + detail::format_real(x));
    s += v;
  }
  return s.value() / static_cast<double>(sample.size());
}

// ---------------------------------------------------------------------------
// Influence functions written row by row, with B_h as tabulated for each
// index: E X^a (GE, ATK, DR), E X log X (THEIL), E log(1/X) (MLD),
// E log X (CHAMP), E exp(-a X) (KOLM).

inline double table_influence(const IndexSpec &spec, double mu, double B, double x) {
  const double a = spec.alpha().value_or(0.0);
  switch (spec.kind()) {
  case IndexKind::GeneralizedEntropy:
    return (1.0 / (a * (a - 1.0))) / std::pow(mu, a) * (std::pow(x, a) - a * B / mu * x);
  case IndexKind::Theil: return (x * std::log(x) - (B / mu + 1.0) * x) / mu;
  case IndexKind::MLD: return x / mu - std::log(x);
  case IndexKind::Atkinson:
    return std::pow(B, 1.0 / a) / mu * (x / mu - std::pow(x, a) / (a * B));
  case IndexKind::Champernowne: return (x / mu - std::log(x)) * std::exp(B) / mu;
  case IndexKind::Kolm: return x + std::exp(-a * x) / (a * B);
  case IndexKind::RenyiDivergence: return (std::pow(x, a) / B - a * x / mu) / (a - 1.0);
  }
  return NAN;
}

/// Tabulated mean influence P(F).
inline double table_mean_influence(const IndexSpec &spec, double mu, double B) {
  const double a = spec.alpha().value_or(0.0);
  switch (spec.kind()) {
  case IndexKind::GeneralizedEntropy: return -B / (a * std::pow(mu, a));
  case IndexKind::Theil: return -1.0;
  case IndexKind::MLD: return 1.0 + B;
  case IndexKind::Atkinson: return (1.0 - 1.0 / a) * std::pow(B, 1.0 / a) / mu;
  case IndexKind::Champernowne: return (1.0 - B) / mu * std::exp(B);
  case IndexKind::Kolm: return mu + 1.0 / a;
  case IndexKind::RenyiDivergence: return -1.0;
  }
  return NAN;
}

/// The tabulated B_h of `spec` at plug-in values.
inline double table_B(const IndexSpec &spec, const Sample &sample) {
  const double a = spec.alpha().value_or(0.0);
  switch (spec.kind()) {
  case IndexKind::GeneralizedEntropy:
  case IndexKind::Atkinson:
  case IndexKind::RenyiDivergence:
    return raw_moment(sample, [a](double x) { return std::pow(x, a); });
  case IndexKind::Theil: return raw_moment(sample, [](double x) { return x * std::log(x); });
  case IndexKind::MLD: return raw_moment(sample, [](double x) { return -std::log(x); });
  case IndexKind::Champernowne: return raw_moment(sample, [](double x) { return std::log(x); });
  case IndexKind::Kolm: return raw_moment(sample, [a](double x) { return std::exp(-a * x); });
  }
  return NAN;
}

/// Brute-force referee: 1/n variance of the tabulated influence values.
inline double referee_variance(const IndexSpec &spec, const Sample &sample) {
  require_domain(sample, spec);
  const double mu = sample.mean();
  const double B = table_B(spec, sample);
  std::vector<double> f;
  f.reserve(sample.size());
  for (double x : sample.values())
    f.push_back(table_influence(spec, mu, B, x));
  return population_variance(f);
}

// ---------------------------------------------------------------------------
// Closed-form variances.

/// Moments entering the power-kernel variance.
struct PowerMoments {
  double mu = 0.0;
  double m_alpha = 0.0;       ///< E X^a (= B_h)
  double m_2alpha = 0.0;      ///< E X^{2a}
  double m_2 = 0.0;           ///< E X^2
  double m_alpha_plus_1 = 0.0; ///< E X^{a+1}
};

inline PowerMoments power_moments(const Sample &sample, double alpha) {
  PowerMoments m;
  m.mu = sample.mean();
  m.m_alpha = raw_moment(sample, [alpha](double x) { return std::pow(x, alpha); });
  m.m_2alpha = raw_moment(sample, [alpha](double x) { return std::pow(x, 2.0 * alpha); });
  m.m_2 = raw_moment(sample, [](double x) { return x * x; });
  m.m_alpha_plus_1 = raw_moment(sample, [alpha](double x) { return std::pow(x, alpha + 1.0); });
  return m;
}

/// Asymptotic variance of I_n = P_n(X^a) / mu_n^a:
///   mu^{-2a} (E X^{2a} + (a B)^2 mu^{-2} E X^2 - 2 a B mu^{-1} E X^{a+1})
///   - B^2 mu^{-2a} (1-a)^2.
inline double sigma2_I_alpha(const PowerMoments &m, double alpha) {
  for (double v : {m.mu, m.m_alpha, m.m_2alpha, m.m_2, m.m_alpha_plus_1})
    if (!std::isfinite(v))
      throw Error(ErrorCode::NonFiniteMoment, "power moment not finite");
  const double B = m.m_alpha;
  const double mu2a = std::pow(m.mu, 2.0 * alpha);
  return (m.m_2alpha + (alpha * B) * (alpha * B) / (m.mu * m.mu) * m.m_2 -
          2.0 * alpha * B / m.mu * m.m_alpha_plus_1) /
             mu2a -
         B * B / mu2a * (1.0 - alpha) * (1.0 - alpha);
}

struct MldMoments {
  double mu, m_2, log2, xlogx, B; // B = E log(1/X)
};

inline MldMoments mld_moments(const Sample &s) {
  return {s.mean(), raw_moment(s, [](double x) { return x * x; }),
          raw_moment(s, [](double x) { return std::log(x) * std::log(x); }),
          raw_moment(s, [](double x) { return x * std::log(x); }),
          raw_moment(s, [](double x) { return -std::log(x); })};
}

inline double sigma2_mld(const MldMoments &m) {
  return m.m_2 / (m.mu * m.mu) + m.log2 - 2.0 / m.mu * m.xlogx - (m.B + 1.0) * (m.B + 1.0);
}

struct ClosedFormValue {
  double sigma2 = 0.0;
  std::string formula;
  /// A second reading of the same printed formula, when one is plausible.
  std::optional<double> alternative;
  std::string alternative_label;
};

/// Evaluates the per-index closed form at plug-in moments. Where the printed
/// formula admits two readings, `sigma2` is the one listed in `formula` and
/// the other is returned in `alternative`.
inline ClosedFormValue sigma2_closed_detail(const IndexSpec &spec, const Sample &sample) {
  require_domain(sample, spec);
  const double a = spec.alpha().value_or(0.0);
  const double mu = sample.mean();
  ClosedFormValue out;
  switch (spec.kind()) {
  case IndexKind::Theil: {
    const double B = raw_moment(sample, [](double x) { return x * std::log(x); });
    const double xlogx2 = raw_moment(sample, [](double x) { return std::pow(x * std::log(x), 2); });
    const double m2 = raw_moment(sample, [](double x) { return x * x; });
    const double x2logx = raw_moment(sample, [](double x) { return x * x * std::log(x); });
    const double c = B / mu + 1.0;
    out.sigma2 = xlogx2 / (mu * mu) + m2 / (mu * mu) * c * c - 2.0 * x2logx / (mu * mu) * c - 1.0;
    out.formula = "E(XlogX)^2/mu^2 + EX^2/mu^2 (B/mu+1)^2 - 2 E(X^2 logX)/mu^2 (B/mu+1) - 1";
    break;
  }
  case IndexKind::MLD:
    out.sigma2 = sigma2_mld(mld_moments(sample));
    out.formula = "EX^2/mu^2 + E(log^2 X) - (2/mu) E(X logX) - (B+1)^2, B = E log(1/X)";
    break;
  case IndexKind::Champernowne: {
    const MldMoments m = mld_moments(sample);
    const double K = std::exp(-m.B) / mu;
    out.sigma2 = K * K * sigma2_mld(m);
    out.formula = "K^2 sigma2_MLD, K = exp(-B)/mu, B = E log(1/X)";
    break;
  }
  case IndexKind::GeneralizedEntropy: {
    const double K = 1.0 / (a * (a - 1.0));
    out.sigma2 = K * K * sigma2_I_alpha(power_moments(sample, a), a);
    out.formula = "K^2 sigma2_I, K = 1/(a(a-1))";
    break;
  }
  case IndexKind::Atkinson: {
    const PowerMoments m = power_moments(sample, a);
    const double s2i = sigma2_I_alpha(m, a);
    const double I = m.m_alpha / std::pow(mu, a);
    out.sigma2 = std::pow(std::pow(I, (1.0 - a) / a), 2.0) / (a * a) * s2i;
    out.formula = "(1/a^2) ((E(X/mu)^a)^((1-a)/a))^2 sigma2_I";
    out.alternative = std::pow(m.m_alpha, std::pow((1.0 - a) / a, 2.0)) / (a * a) * s2i;
    out.alternative_label = "(1/a^2) (EX^a)^(((1-a)/a)^2) sigma2_I (raw moment, squared exponent)";
    break;
  }
  case IndexKind::RenyiDivergence: {
    const PowerMoments m = power_moments(sample, a);
    const double s2i = sigma2_I_alpha(m, a);
    const double I = m.m_alpha / std::pow(mu, a);
    out.sigma2 = s2i / std::pow((a - 1.0) * I, 2.0);
    out.formula = "sigma2_I / ((a-1) E(X/mu)^a)^2";
    out.alternative = s2i / std::pow((a - 1.0) * m.m_alpha, 2.0);
    out.alternative_label = "sigma2_I / ((a-1) EX^a)^2 (raw moment)";
    break;
  }
  case IndexKind::Kolm: {
    const double B = raw_moment(sample, [a](double x) { return std::exp(-a * x); });
    const double e2 = raw_moment(sample, [a](double x) { return std::exp(-2.0 * a * x); });
    const double m2 = raw_moment(sample, [](double x) { return x * x; });
    const double xe_plus = raw_moment(sample, [a](double x) { return x * std::exp(a * x); });
    const double xe_minus = raw_moment(sample, [a](double x) { return x * std::exp(-a * x); });
    const double tail = (1.0 / a + mu) * (1.0 / a + mu);
    const double aB = a * B;
    out.sigma2 = e2 / (aB * aB) + m2 + 2.0 / aB * xe_plus - tail;
    out.formula = "E e^{-2aX}/(aB)^2 + EX^2 + (2/(aB)) E(X e^{aX}) - (1/a + mu)^2";
    out.alternative = e2 / (aB * aB) + m2 + 2.0 / aB * xe_minus - tail;
    out.alternative_label = "cross term E(X e^{-aX})";
    break;
  }
  }
  if (!std::isfinite(out.sigma2))
    throw Error(ErrorCode::NonFiniteMoment, spec.name() + ": closed-form variance not finite");
  return out;
}

inline double sigma2_closed(const IndexSpec &spec, const Sample &sample) {
  return sigma2_closed_detail(spec, sample).sigma2;
}

// ---------------------------------------------------------------------------
// Cross-check ledger.

enum class CrossCheckStatus { Agree, PaperTypoSuspected };

constexpr std::string_view to_string(CrossCheckStatus s) noexcept {
  return s == CrossCheckStatus::Agree ? "Agree" : "PaperTypoSuspected";
}

inline constexpr double crosscheck_rtol = 1e-8;

/// |x - ref| / max(|ref|, 1e-12); the floor only matters for samples whose
/// variance is zero up to rounding.
inline double relative_gap(double x, double ref) {
  return std::fabs(x - ref) / std::max(std::fabs(ref), 1e-12);
}

struct ClosedFormReport {
  IndexSpec spec;
  double sigma2_closed = 0.0;
  double sigma2_general = 0.0;
  double sigma2_referee = 0.0;
  double rel_gap = 0.0;         ///< closed vs general
  double referee_gap = 0.0;     ///< referee vs general
  CrossCheckStatus status = CrossCheckStatus::Agree;
  std::string formula{};
  std::optional<double> sigma2_alternative{};
  std::optional<double> alternative_gap{};
  std::string alternative_label{};
  std::string note{};
  std::size_t n = 0;
};

inline ClosedFormReport crosscheck(const IndexSpec &spec, const Sample &sample) {
  ClosedFormValue closed = sigma2_closed_detail(spec, sample);
  ClosedFormReport r{spec};
  r.n = sample.size();
  r.sigma2_closed = closed.sigma2;
  r.sigma2_general = variance_plugin(spec, sample);
  r.sigma2_referee = referee_variance(spec, sample);
  r.rel_gap = relative_gap(r.sigma2_closed, r.sigma2_general);
  r.referee_gap = relative_gap(r.sigma2_referee, r.sigma2_general);
  r.status = r.rel_gap <= crosscheck_rtol ? CrossCheckStatus::Agree
                                          : CrossCheckStatus::PaperTypoSuspected;
  r.formula = std::move(closed.formula);
  r.alternative_label = std::move(closed.alternative_label);
  if (closed.alternative) {
    r.sigma2_alternative = closed.alternative;
    r.alternative_gap = relative_gap(*closed.alternative, r.sigma2_general);
  }
  const bool referee_ok = r.referee_gap <= crosscheck_rtol;
  r.note = referee_ok ? "referee agrees with general formula"
                      : "referee DISAGREES with general formula";
  if (r.status == CrossCheckStatus::PaperTypoSuspected && r.alternative_gap &&
      *r.alternative_gap <= crosscheck_rtol)
    r.note += "; alternative reading agrees";
  return r;
}

} // namespace tlim
