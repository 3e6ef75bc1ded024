#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tlim {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

/// Key of stream `index` under `master`: mix64(mix64(master) + (index+1)*gamma).
/// Replicate r of a simulation always uses stream r, whatever thread runs it.
constexpr std::uint64_t derive_key(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + (index + 1) * golden_gamma);
}

/// Counter-based generator: the i-th output is mix64(key + i * gamma), i.e.
/// SplitMix64 started at `key`. Deterministic and platform independent; the
/// variate transforms below use only IEEE arithmetic and libm exp/log/cos.
class CounterRng {
public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * golden_gamma); }

  /// Uniform on the open interval (0,1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; the second variate of each pair is kept.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang, with the u^{1/k} boost for k < 1.
  double gamma(double shape) noexcept {
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double z, v;
      do {
        z = normal();
        v = 1.0 + c * z;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * z * z * z * z)
        return d * v;
      if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
        return d * v;
    }
  }

  std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace tlim
