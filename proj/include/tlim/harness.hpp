#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "tlim/asymptotics.hpp"
#include "tlim/error.hpp"
#include "tlim/feasibility.hpp"
#include "tlim/index.hpp"
#include "tlim/inequality.hpp"
#include "tlim/model.hpp"
#include "tlim/population.hpp"
#include "tlim/random.hpp"
#include "tlim/sample.hpp"
#include "tlim/summation.hpp"

namespace tlim {

/// n observations from `model`, a pure function of (model, n, key).
inline Sample draw(const PopulationModel &model, std::size_t n, std::uint64_t key) {
  if (n == 0)
    throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  CounterRng rng(key);
  std::vector<double> xs(n);
  const double p1 = model.first(), p2 = model.second();
  switch (model.family()) {
  case ModelFamily::Lognormal:
    for (auto &x : xs)
      x = std::exp(p1 + p2 * rng.normal());
    break;
  case ModelFamily::Gamma:
    for (auto &x : xs)
      x = p2 * rng.gamma(p1);
    break;
  case ModelFamily::Pareto:
    for (auto &x : xs)
      x = p2 * std::pow(rng.uniform(), -1.0 / p1);
    break;
  case ModelFamily::PointMass: std::fill(xs.begin(), xs.end(), p1); break;
  }
  const bool negative_atom = model.family() == ModelFamily::PointMass && p1 < 0.0;
  return make_sample(std::move(xs), negative_atom ? ValueDomain::Real : ValueDomain::Positive);
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// One-sample Kolmogorov-Smirnov distance to the standard normal CDF.
inline double ks_distance_normal(std::vector<double> zs) {
  if (zs.empty())
    return 0.0;
  std::sort(zs.begin(), zs.end());
  const double n = static_cast<double>(zs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double cdf = standard_normal_cdf(zs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

struct HarnessOptions {
  unsigned threads = 1;
  bool force = false; ///< run even when a required moment is infinite
};

struct SimReport {
  IndexSpec spec;
  PopulationModel model;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double level = 0.95;
  std::uint64_t seed = 0;
  double truth_T = 0.0;
  double truth_sigma2 = 0.0;
  double coverage = 0.0;
  double ks_distance = 0.0;
  double variance_ratio = 0.0; ///< mean sigma2_hat / truth_sigma2
  double mean_bias = 0.0;      ///< mean (T_r - T)
  double mean_abs_error = 0.0; ///< mean |T_r - T|
  bool degenerate = false;     ///< truth_sigma2 == 0: ks/variance_ratio undefined
  bool feasible = true;
  std::vector<double> standardized{}; ///< sqrt(n)(T_r - T)/sigma, replicate order
};

namespace detail {

struct ReplicateResult {
  double value = 0.0;
  double sigma2 = 0.0;
  bool covered = false;
};

// Runs job(i) for i in [0, count) over `threads` contiguous blocks. Each
// result slot is written by exactly one thread; the first exception wins.
template <class Job> void parallel_for(std::size_t count, unsigned threads, Job &&job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i)
      job(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    const std::size_t block = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * block, hi = std::min(count, lo + block);
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i)
            job(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure)
            failure = std::current_exception();
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

inline void require_feasible(const PopulationModel &model, const IndexSpec &spec, bool force) {
  const auto v = moment_feasibility(model, spec);
  if (!v.feasible() && !force)
    throw Error(ErrorCode::InfeasibleMoments,
                spec.name() + " under " + model.name() + " needs " + v.missing());
}

} // namespace detail

/// Monte-Carlo check of consistency and asymptotic normality. Replicate r
/// draws from stream derive_key(seed, r), so the report does not depend on
/// thread count or execution order; aggregation runs in replicate order.
inline SimReport run_replicates(const PopulationModel &model, const IndexSpec &spec,
                                std::size_t n, std::size_t replicates, double level,
                                std::uint64_t seed, const HarnessOptions &opt = {}) {
  if (replicates < 100)
    throw Error(ErrorCode::InvalidArgument, "at least 100 replicates are required");
  if (n == 0)
    throw Error(ErrorCode::InvalidArgument, "sample size must be at least 1");
  const double z = normal_critical_value(level);
  const auto verdict = moment_feasibility(model, spec);
  detail::require_feasible(model, spec, opt.force);

  SimReport rep{spec, model};
  rep.n = n;
  rep.replicates = replicates;
  rep.level = level;
  rep.seed = seed;
  rep.feasible = verdict.feasible();

  // With --force on an infeasible model the quadrature truth may not exist;
  // fall back to the population index alone.
  PopulationTruth truth;
  if (rep.feasible) {
    truth = population_truth(model, spec);
  } else {
    truth.T = eval_population(spec, model);
    truth.sigma2 = NAN;
  }
  rep.truth_T = truth.T;
  rep.truth_sigma2 = truth.sigma2;

  std::vector<detail::ReplicateResult> results(replicates);
  detail::parallel_for(replicates, opt.threads, [&](std::size_t r) {
    const Sample s = draw(model, n, derive_key(seed, r));
    const Estimate e = estimate(spec, s, level);
    // Rounding slack so that zero-width intervals around an exact truth count.
    const double slack = 1e-12 * std::max(1.0, std::fabs(truth.T));
    results[r] = {e.value, e.sigma2, std::fabs(e.value - truth.T) <= z * e.std_error + slack};
  });

  CompensatedSum covered, bias, abs_err, s2;
  for (const auto &r : results) {
    covered += r.covered ? 1.0 : 0.0;
    bias += r.value - truth.T;
    abs_err += std::fabs(r.value - truth.T);
    s2 += r.sigma2;
  }
  const double R = static_cast<double>(replicates);
  rep.coverage = covered.value() / R;
  rep.mean_bias = bias.value() / R;
  rep.mean_abs_error = abs_err.value() / R;

  rep.degenerate = !(truth.sigma2 > 0.0);
  if (rep.degenerate) {
    rep.ks_distance = 0.0;
    rep.variance_ratio = NAN;
  } else {
    const double sd = std::sqrt(truth.sigma2);
    const double rn = std::sqrt(static_cast<double>(n));
    rep.standardized.reserve(replicates);
    for (const auto &r : results)
      rep.standardized.push_back(rn * (r.value - truth.T) / sd);
    rep.ks_distance = ks_distance_normal(rep.standardized);
    rep.variance_ratio = s2.value() / R / truth.sigma2;
  }
  return rep;
}

struct BiasRow {
  std::size_t n = 0;
  double mean_abs_error = 0.0;
  double mean_bias = 0.0;
};

/// Mean |T_n - T| over `replicates` draws for each n in the grid. Grid point
/// g uses streams derive_key(derive_key(seed, g), r).
inline std::vector<BiasRow> consistency_sweep(const PopulationModel &model, const IndexSpec &spec,
                                              const std::vector<std::size_t> &grid,
                                              std::size_t replicates, std::uint64_t seed,
                                              const HarnessOptions &opt = {}) {
  if (grid.empty() || replicates == 0)
    throw Error(ErrorCode::InvalidArgument, "empty grid or zero replicates");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw Error(ErrorCode::InvalidArgument, "sample-size grid must be strictly increasing");
  detail::require_feasible(model, spec, opt.force);
  const double truth = eval_population(spec, model);

  std::vector<BiasRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> values(replicates);
    const std::uint64_t grid_key = derive_key(seed, g);
    detail::parallel_for(replicates, opt.threads, [&](std::size_t r) {
      values[r] = eval_index(spec, draw(model, grid[g], derive_key(grid_key, r)));
    });
    CompensatedSum abs_err, bias;
    for (double v : values) {
      abs_err += std::fabs(v - truth);
      bias += v - truth;
    }
    const double R = static_cast<double>(replicates);
    rows.push_back({grid[g], abs_err.value() / R, bias.value() / R});
  }
  return rows;
}

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double expected = 0.0; ///< count expected under N(0,1)
};

/// Equal-width bins on [lo, hi]; the outer bins absorb the tails.
inline std::vector<HistogramBin> normal_histogram(const std::vector<double> &zs, double lo,
                                                  double hi, std::size_t bins) {
  std::vector<HistogramBin> out(bins);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = lo + w * static_cast<double>(b);
    out[b].upper = lo + w * static_cast<double>(b + 1);
    const double pl = b == 0 ? 0.0 : standard_normal_cdf(out[b].lower);
    const double pu = b + 1 == bins ? 1.0 : standard_normal_cdf(out[b].upper);
    out[b].expected = (pu - pl) * static_cast<double>(zs.size());
  }
  for (double z : zs) {
    auto b = static_cast<std::ptrdiff_t>(std::floor((z - lo) / w));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

} // namespace tlim
