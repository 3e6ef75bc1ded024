#pragma once

#include <cstdint>
#include <vector>

#include "tlim/tlim.hpp"

namespace support {

/// The parameter choices exercised for each kind.
inline std::vector<tlim::IndexSpec> index_panel() {
  using tlim::IndexKind;
  using tlim::catalog;
  return {catalog(IndexKind::GeneralizedEntropy, 0.5), catalog(IndexKind::GeneralizedEntropy, 2.0),
          catalog(IndexKind::Theil),                   catalog(IndexKind::MLD),
          catalog(IndexKind::Atkinson, 0.5),           catalog(IndexKind::Atkinson, -0.5),
          catalog(IndexKind::Champernowne),            catalog(IndexKind::Kolm, 1.0),
          catalog(IndexKind::RenyiDivergence, 0.5),    catalog(IndexKind::RenyiDivergence, 2.0)};
}

/// Lognormal sample whose size and spread vary with `i`.
inline tlim::Sample lognormal_sample(std::uint64_t i, std::size_t n = 0) {
  tlim::CounterRng rng(tlim::derive_key(0xC0FFEE, i));
  const double sd = 0.2 + 0.8 * rng.uniform();
  const double m = -1.0 + 2.0 * rng.uniform();
  if (n == 0)
    n = 5 + static_cast<std::size_t>(rng.next_u64() % 300);
  return tlim::draw(tlim::PopulationModel::lognormal(m, sd), n, tlim::derive_key(0xBEEF, i));
}

inline std::vector<double> values(const tlim::Sample &s) {
  return {s.values().begin(), s.values().end()};
}

} // namespace support
