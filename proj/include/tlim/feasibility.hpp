#pragma once

#include <string>
#include <vector>

#include "tlim/index.hpp"
#include "tlim/model.hpp"

namespace tlim {

/// Which limit theorem needs the moment.
enum class MomentPurpose {
  Consistency, ///< mean and E h(X)
  Normality,   ///< E h(X)^2, E X h(X), E X^2
};

struct MomentCheck {
  std::string label; ///< e.g. "E|X|^4"
  MomentTerm term;
  MomentPurpose purpose;
  bool exists = true;
};

struct FeasibilityVerdict {
  std::vector<MomentCheck> checks;

  bool consistent() const {
    for (const auto &c : checks)
      if (c.purpose == MomentPurpose::Consistency && !c.exists)
        return false;
    return true;
  }
  bool feasible() const {
    for (const auto &c : checks)
      if (!c.exists)
        return false;
    return true;
  }
  /// Comma-separated labels of the moments that do not exist.
  std::string missing() const {
    std::string s;
    for (const auto &c : checks)
      if (!c.exists)
        s += (s.empty() ? "" : ", ") + c.label;
    return s;
  }
};

namespace detail {

inline std::string moment_label(const MomentTerm &m) {
  std::string body;
  auto power = [](double p) {
    return p == 1.0 ? std::string("X") : "X^" + format_real(p);
  };
  if (m.power != 0.0)
    body = power(m.power);
  if (m.log_power != 0) {
    if (!body.empty())
      body += " ";
    body += m.log_power == 1 ? "log X" : "log^" + std::to_string(m.log_power) + " X";
  }
  if (m.exp_rate != 0.0) {
    if (!body.empty())
      body += " ";
    body += "e^(" + format_real(m.exp_rate) + "X)";
  }
  if (body.empty())
    body = "1";
  return "E|" + body + "|";
}

} // namespace detail

/// Moments required for a.s. consistency and asymptotic normality of `spec`:
/// E|X|, E|h(X)|, E h(X)^2, E|X h(X)| and E X^2, with h written as
/// x^p log^q(x) e^{cx}.
inline std::vector<MomentCheck> required_moments(const IndexSpec &spec) {
  MomentTerm h{};
  const double a = spec.alpha().value_or(0.0);
  switch (spec.kind()) {
  case IndexKind::GeneralizedEntropy:
  case IndexKind::Atkinson:
  case IndexKind::RenyiDivergence: h = {a, 0, 0.0}; break;
  case IndexKind::Theil: h = {1.0, 1, 0.0}; break;
  case IndexKind::MLD:
  case IndexKind::Champernowne: h = {0.0, 1, 0.0}; break;
  case IndexKind::Kolm: h = {0.0, 0, -a}; break;
  }
  const MomentTerm mean{1.0, 0, 0.0};
  const MomentTerm h2{2.0 * h.power, 2 * h.log_power, 2.0 * h.exp_rate};
  const MomentTerm xh{h.power + 1.0, h.log_power, h.exp_rate};
  const MomentTerm x2{2.0, 0, 0.0};

  std::vector<MomentCheck> out;
  auto add = [&](const MomentTerm &t, MomentPurpose p) {
    const std::string label = detail::moment_label(t);
    for (const auto &c : out)
      if (c.label == label)
        return;
    out.push_back({label, t, p, true});
  };
  add(mean, MomentPurpose::Consistency);
  add(h, MomentPurpose::Consistency);
  add(h2, MomentPurpose::Normality);
  add(xh, MomentPurpose::Normality);
  add(x2, MomentPurpose::Normality);
  return out;
}

inline FeasibilityVerdict moment_feasibility(const PopulationModel &model, const IndexSpec &spec) {
  FeasibilityVerdict v;
  v.checks = required_moments(spec);
  for (auto &c : v.checks)
    c.exists = model.moment_exists(c.term);
  return v;
}

} // namespace tlim
