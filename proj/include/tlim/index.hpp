#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "tlim/error.hpp"

namespace tlim {

/// The seven members of the Theil-like family.
enum class IndexKind {
  GeneralizedEntropy,
  Theil,
  MLD,
  Atkinson,
  Champernowne,
  Kolm,
  RenyiDivergence,
};

inline constexpr std::array<IndexKind, 7> all_index_kinds = {
    IndexKind::GeneralizedEntropy, IndexKind::Theil,
    IndexKind::MLD,                IndexKind::Atkinson,
    IndexKind::Champernowne,       IndexKind::Kolm,
    IndexKind::RenyiDivergence};

/// Short labels, as used in reports and on the command line.
constexpr std::string_view short_name(IndexKind kind) noexcept {
  switch (kind) {
  case IndexKind::GeneralizedEntropy: return "GE";
  case IndexKind::Theil: return "THEIL";
  case IndexKind::MLD: return "MLD";
  case IndexKind::Atkinson: return "ATK";
  case IndexKind::Champernowne: return "CHAMP";
  case IndexKind::Kolm: return "KOLM";
  case IndexKind::RenyiDivergence: return "DR";
  }
  return "?";
}

constexpr bool takes_parameter(IndexKind kind) noexcept {
  return kind == IndexKind::GeneralizedEntropy || kind == IndexKind::Atkinson ||
         kind == IndexKind::Kolm || kind == IndexKind::RenyiDivergence;
}

/// Kolm is the only member whose kernels are defined on the whole real line.
constexpr bool requires_positive_values(IndexKind kind) noexcept {
  return kind != IndexKind::Kolm;
}

/// Kolm is translation invariant; every other member is scale invariant.
constexpr bool is_scale_invariant(IndexKind kind) noexcept {
  return kind != IndexKind::Kolm;
}

namespace detail {

inline std::string format_real(double x) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{})
    return "nan";
  return std::string(buf.data(), ptr);
}

} // namespace detail

/// Identifies phi = (tau, h, h1, h2) for one member of the family and
/// evaluates its kernels. Construct through `catalog`.
class IndexSpec {
public:
  IndexKind kind() const noexcept { return kind_; }
  std::optional<double> alpha() const noexcept { return alpha_; }

  /// "THEIL", "GE(2)", "ATK(-0.5)", ...
  std::string name() const {
    std::string s(short_name(kind_));
    if (alpha_)
      s += "(" + detail::format_real(*alpha_) + ")";
    return s;
  }

  // Outer transform tau and its derivative.
  double tau(double t) const noexcept {
    switch (kind_) {
    case IndexKind::GeneralizedEntropy: return (t - 1.0) / (a() * (a() - 1.0));
    case IndexKind::Theil:
    case IndexKind::MLD: return t;
    case IndexKind::Atkinson: return 1.0 - std::pow(t, 1.0 / a());
    case IndexKind::Champernowne: return 1.0 - std::exp(t);
    case IndexKind::Kolm: return std::log(t) / a();
    case IndexKind::RenyiDivergence: return std::log(t) / (a() - 1.0);
    }
    return NAN;
  }

  double tau_prime(double t) const noexcept {
    switch (kind_) {
    case IndexKind::GeneralizedEntropy: return 1.0 / (a() * (a() - 1.0));
    case IndexKind::Theil:
    case IndexKind::MLD: return 1.0;
    case IndexKind::Atkinson: return -std::pow(t, 1.0 / a() - 1.0) / a();
    case IndexKind::Champernowne: return -std::exp(t);
    case IndexKind::Kolm: return 1.0 / (a() * t);
    case IndexKind::RenyiDivergence: return 1.0 / ((a() - 1.0) * t);
    }
    return NAN;
  }

  /// Whether tau is defined (and differentiable) at t.
  bool tau_defined_at(double t) const noexcept {
    if (!std::isfinite(t))
      return false;
    switch (kind_) {
    case IndexKind::Atkinson:
    case IndexKind::Kolm:
    case IndexKind::RenyiDivergence: return t > 0.0;
    default: return true;
    }
  }

  double h(double x) const noexcept {
    switch (kind_) {
    case IndexKind::GeneralizedEntropy:
    case IndexKind::Atkinson:
    case IndexKind::RenyiDivergence: return std::pow(x, a());
    case IndexKind::Theil: return x * std::log(x);
    case IndexKind::MLD: return -std::log(x);
    case IndexKind::Champernowne: return std::log(x);
    case IndexKind::Kolm: return std::exp(-a() * x);
    }
    return NAN;
  }

  double h1(double y) const noexcept {
    switch (kind_) {
    case IndexKind::GeneralizedEntropy:
    case IndexKind::Atkinson:
    case IndexKind::RenyiDivergence: return std::pow(y, a());
    case IndexKind::Theil: return y;
    case IndexKind::MLD:
    case IndexKind::Champernowne: return 1.0;
    case IndexKind::Kolm: return std::exp(-a() * y);
    }
    return NAN;
  }

  double h1_prime(double y) const noexcept {
    switch (kind_) {
    case IndexKind::GeneralizedEntropy:
    case IndexKind::Atkinson:
    case IndexKind::RenyiDivergence: return a() * std::pow(y, a() - 1.0);
    case IndexKind::Theil: return 1.0;
    case IndexKind::MLD:
    case IndexKind::Champernowne: return 0.0;
    case IndexKind::Kolm: return -a() * std::exp(-a() * y);
    }
    return NAN;
  }

  double h2(double z) const noexcept {
    switch (kind_) {
    case IndexKind::Theil:
    case IndexKind::Champernowne: return std::log(z);
    case IndexKind::MLD: return -std::log(z);
    default: return 0.0;
    }
  }

  double h2_prime(double z) const noexcept {
    switch (kind_) {
    case IndexKind::Theil:
    case IndexKind::Champernowne: return 1.0 / z;
    case IndexKind::MLD: return -1.0 / z;
    default: return 0.0;
    }
  }

  friend bool operator==(const IndexSpec &, const IndexSpec &) = default;

private:
  friend IndexSpec catalog(IndexKind kind, std::optional<double> alpha);

  IndexSpec(IndexKind kind, std::optional<double> alpha)
      : kind_(kind), alpha_(alpha) {}

  double a() const noexcept { return alpha_.value_or(NAN); }

  IndexKind kind_;
  std::optional<double> alpha_;
};

/// Builds the spec for `kind`. Parameter windows are enforced strictly:
/// GE needs alpha not in {0,1}, Atkinson alpha < 1 and alpha != 0, Kolm
/// alpha > 0, Renyi alpha > 0 and alpha != 1. Passing alpha to a
/// parameter-free kind is also an error.
inline IndexSpec catalog(IndexKind kind, std::optional<double> alpha = std::nullopt) {
  const std::string label(short_name(kind));
  if (!takes_parameter(kind)) {
    if (alpha)
      throw Error(ErrorCode::InvalidArgument, label + " takes no parameter");
    return IndexSpec(kind, std::nullopt);
  }
  if (!alpha)
    throw Error(ErrorCode::MissingParameter, label + " requires alpha");
  const double a = *alpha;
  bool ok = std::isfinite(a);
  switch (kind) {
  case IndexKind::GeneralizedEntropy: ok = ok && a != 0.0 && a != 1.0; break;
  case IndexKind::Atkinson: ok = ok && a < 1.0 && a != 0.0; break;
  case IndexKind::Kolm: ok = ok && a > 0.0; break;
  case IndexKind::RenyiDivergence: ok = ok && a > 0.0 && a != 1.0; break;
  default: break;
  }
  if (!ok)
    throw Error(ErrorCode::ParameterOutOfRange,
                label + " alpha=" + detail::format_real(a) + " outside the admissible window");
  return IndexSpec(kind, alpha);
}

/// Parses "GE:0.5", "GE(0.5)", "THEIL", "atk:-0.5" (case-insensitive labels). Also
/// accepts the long kind names, e.g. "Theil" or "GeneralizedEntropy:2".
inline IndexSpec parse_index(std::string_view raw) {
  // "GE(0.5)", as printed by IndexSpec::name(), is read as "GE:0.5".
  std::string normalized(raw);
  if (const auto open = normalized.find('('); open != std::string::npos &&
                                              !normalized.empty() && normalized.back() == ')') {
    normalized.pop_back();
    normalized[open] = ':';
  }
  const std::string_view text = normalized;
  std::string label;
  std::optional<double> alpha;
  const auto colon = text.find(':');
  std::string_view head = text.substr(0, colon);
  for (char c : head)
    label += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (colon != std::string_view::npos) {
    std::string_view tail = text.substr(colon + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || tail.empty())
      throw Error(ErrorCode::InvalidArgument, "bad index parameter in '" + std::string(text) + "'");
    alpha = v;
  }
  struct Alias {
    std::string_view name;
    IndexKind kind;
  };
  static constexpr std::array<Alias, 14> aliases = {{
      {"GE", IndexKind::GeneralizedEntropy},
      {"GENERALIZEDENTROPY", IndexKind::GeneralizedEntropy},
      {"THEIL", IndexKind::Theil},
      {"MLD", IndexKind::MLD},
      {"ATK", IndexKind::Atkinson},
      {"ATKINSON", IndexKind::Atkinson},
      {"CHAMP", IndexKind::Champernowne},
      {"CHAMPERNOWNE", IndexKind::Champernowne},
      {"KOLM", IndexKind::Kolm},
      {"KO", IndexKind::Kolm},
      {"DR", IndexKind::RenyiDivergence},
      {"RENYI", IndexKind::RenyiDivergence},
      {"RENYIDIVERGENCE", IndexKind::RenyiDivergence},
      {"CH", IndexKind::Champernowne},
  }};
  for (const auto &a : aliases)
    if (a.name == label)
      return catalog(a.kind, alpha);
  throw Error(ErrorCode::InvalidArgument, "unknown index '" + std::string(text) + "'");
}

} // namespace tlim
