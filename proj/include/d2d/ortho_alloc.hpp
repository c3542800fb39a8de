#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2d/numerics.hpp"
#include "d2d/reuse_power.hpp"  // InfeasibleError

namespace d2d {

// Rate of a user holding bandwidth fraction x against full-band noise:
// x * log2(1 + gamma / x), continuously extended to 0 at x = 0.
inline double fraction_rate(double x, double gamma) {
  if (!(x > 0.0) || !(gamma > 0.0)) return 0.0;
  return x * std::log2(1.0 + gamma / x);
}

struct DedicatedAllocation {
  std::vector<double> fractions;
  std::vector<double> per_user_rate;
  double sum_rate = 0.0;
};

// Greedy frequency split: fractions proportional to SNR, sum rate
// log2(1 + sum of SNRs). All-zero SNRs degenerate to an equal split.
inline DedicatedAllocation dedicated_unconstrained(std::span<const double> gammas) {
  if (gammas.size() < 2) throw std::invalid_argument("dedicated_unconstrained: need at least 2 users");
  DedicatedAllocation alloc;
  const std::size_t n = gammas.size();
  const double total = std::accumulate(gammas.begin(), gammas.end(), 0.0);
  alloc.fractions.resize(n);
  alloc.per_user_rate.resize(n);
  if (!(total > 0.0)) {
    std::fill(alloc.fractions.begin(), alloc.fractions.end(), 1.0 / static_cast<double>(n));
    return alloc;
  }
  alloc.sum_rate = std::log2(1.0 + total);
  for (std::size_t i = 0; i < n; ++i) {
    alloc.fractions[i] = gammas[i] / total;
    alloc.per_user_rate[i] = alloc.fractions[i] * alloc.sum_rate;  // gamma_i / x_i == total
  }
  return alloc;
}

// Smallest fraction meeting a rate target: the alpha in (0, 1] with
// alpha log2(1 + gamma/alpha) = r_min, via the -1 branch of Lambert W.
inline double min_fraction_for_rate(double gamma, double r_min) {
  if (!(gamma > 0.0)) throw std::domain_error("min_fraction_for_rate: gamma must be positive");
  if (r_min < 0.0) throw std::domain_error("min_fraction_for_rate: r_min must be non-negative");
  if (r_min == 0.0) return 0.0;
  const double capacity = std::log2(1.0 + gamma);
  if (r_min > capacity * (1.0 + 1e-12))
    throw InfeasibleError("min_fraction_for_rate: target exceeds full-band rate");
  if (r_min >= capacity) return 1.0;
  const double ln2 = std::log(2.0);
  const double arg = -(r_min * ln2 / gamma) * std::exp2(-r_min / gamma);
  const double w = lambert_w(WBranch::MinusOne, arg);
  const double alpha = -gamma * r_min * ln2 / (r_min * ln2 + gamma * w);
  return std::clamp(alpha, 0.0, 1.0);
}

// Constrained split: start from the proportional solution, clamp users below
// their minimum fraction, and re-split the remainder proportionally among
// the rest. Each pass only grows the clamped set, so it ends in <= N rounds
// at the KKT point of the concave objective.
inline DedicatedAllocation dedicated_constrained(std::span<const double> gammas,
                                                 std::span<const double> r_mins) {
  const std::size_t n = gammas.size();
  if (r_mins.size() != n)
    throw std::invalid_argument("dedicated_constrained: one rate target per user required");
  std::vector<double> min_frac(n);
  double min_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r_mins[i] > 0.0 && !(gammas[i] > 0.0))
      throw InfeasibleError("dedicated_constrained: dead link with a positive rate target");
    min_frac[i] = r_mins[i] > 0.0 ? min_fraction_for_rate(gammas[i], r_mins[i]) : 0.0;
    min_total += min_frac[i];
  }
  if (min_total > 1.0 + 1e-9)
    throw InfeasibleError("dedicated_constrained: minimum fractions exceed the band");

  DedicatedAllocation alloc;
  alloc.fractions.assign(n, 0.0);
  alloc.per_user_rate.assign(n, 0.0);
  std::vector<bool> clamped(n, false);
  for (std::size_t round = 0; round <= n; ++round) {
    double free_fraction = 1.0;
    double free_gamma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i])
        free_fraction -= min_frac[i];
      else
        free_gamma += gammas[i];
    }
    bool violated = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i]) {
        alloc.fractions[i] = min_frac[i];
        continue;
      }
      alloc.fractions[i] = free_gamma > 0.0
                               ? std::max(0.0, free_fraction) * gammas[i] / free_gamma
                               : std::max(0.0, free_fraction) / static_cast<double>(n);
      if (alloc.fractions[i] < min_frac[i] * (1.0 - 1e-12)) {
        clamped[i] = true;
        violated = true;
      }
    }
    if (!violated) break;
  }
  alloc.sum_rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    alloc.per_user_rate[i] = fraction_rate(alloc.fractions[i], gammas[i]);
    alloc.sum_rate += alloc.per_user_rate[i];
  }
  return alloc;
}

// SNRs feeding the relayed-mode allocation.
struct CellularSnrs {
  double cue_ul = 0.0;  // CUE -> MBS
  double d2d_ul = 0.0;  // DTx -> MBS
  double d2d_dl = 0.0;  // MBS -> DRx
  double fue = 0.0;     // FAP -> FUE
};

struct CellularRateMins {
  double cue = 0.0;
  double d2d = 0.0;
  double fue = 0.0;
};

// Time split that equalizes uplink and downlink D2D throughput for given
// bandwidth fractions. Degenerate hops fall back to beta = 1 (no downlink
// phase, D2D rate zero).
inline double beta_split(double alpha, double alpha_prime, const CellularSnrs& snrs) {
  if (!(alpha_prime > 0.0) || !(alpha + alpha_prime > 0.0)) return 1.0;
  const double r_ul = std::log2(1.0 + snrs.d2d_ul / alpha_prime);
  const double r_dl = std::log2(1.0 + snrs.d2d_dl / (alpha + alpha_prime));
  if (!(r_dl > 0.0)) return 1.0;  // dead downlink hop: keep the uplink phase
  return r_dl / (alpha_prime / (alpha + alpha_prime) * r_ul + r_dl);
}

struct CellularAllocation {
  double alpha = 0.0;
  double alpha_prime = 0.0;
  double beta = 1.0;
  double beta_prime = 0.0;
  double rate_cue = 0.0;
  double rate_d2d = 0.0;
  double rate_fue = 0.0;
  double sum_rate = 0.0;
  bool feasible = true;
  std::size_t evaluations = 0;
};

namespace detail {

// Per-user rates of the relayed-mode partition at a given (alpha, alpha').
// The D2D term is the end-to-end min of the two hops; with beta from
// beta_split both sides coincide except in degenerate corners. The FUE term
// spans both time phases on its own sub-band.
inline CellularAllocation cellular_point(double alpha, double alpha_prime,
                                         const CellularSnrs& snrs) {
  CellularAllocation a;
  a.alpha = alpha;
  a.alpha_prime = alpha_prime;
  a.beta = beta_split(alpha, alpha_prime, snrs);
  a.beta_prime = 1.0 - a.beta;
  const double ul_side =
      alpha_prime > 0.0 ? alpha_prime * a.beta * std::log2(1.0 + snrs.d2d_ul / alpha_prime) : 0.0;
  const double dl_side = (alpha + alpha_prime) > 0.0
                             ? (alpha + alpha_prime) * a.beta_prime *
                                   std::log2(1.0 + snrs.d2d_dl / (alpha + alpha_prime))
                             : 0.0;
  a.rate_d2d = std::min(ul_side, dl_side);
  a.rate_cue = a.beta * fraction_rate(alpha, snrs.cue_ul);
  a.rate_fue = fraction_rate(1.0 - alpha - alpha_prime, snrs.fue);
  a.sum_rate = a.rate_cue + a.rate_d2d + a.rate_fue;
  return a;
}

}  // namespace detail

// Lattice search over the bandwidth fractions, beta chosen per point.
inline CellularAllocation cellular_unconstrained(const CellularSnrs& snrs, double step) {
  if (!(step > 0.0) || step > 0.1)
    throw std::invalid_argument("cellular_unconstrained: need step in (0, 0.1]");
  const SearchResult2D r = grid_search_max_2d(
      [&](double a, double ap) { return detail::cellular_point(a, ap, snrs).sum_rate; }, step);
  CellularAllocation best = detail::cellular_point(r.a, r.b, snrs);
  best.evaluations = r.evaluations;
  return best;
}

// Same lattice restricted to points where every user meets its target.
// Infeasibility is a value: no lattice point qualifying is a valid outcome.
inline CellularAllocation cellular_constrained(const CellularSnrs& snrs,
                                               const CellularRateMins& mins, double step) {
  if (!(step > 0.0) || step > 0.1)
    throw std::invalid_argument("cellular_constrained: need step in (0, 0.1]");
  constexpr double kTol = 1e-12;
  const SearchResult2D r = grid_search_max_2d(
      [&](double a, double ap) {
        const CellularAllocation c = detail::cellular_point(a, ap, snrs);
        if (c.rate_cue + kTol < mins.cue || c.rate_d2d + kTol < mins.d2d ||
            c.rate_fue + kTol < mins.fue)
          return -std::numeric_limits<double>::infinity();
        return c.sum_rate;
      },
      step);
  if (!std::isfinite(r.value)) {
    CellularAllocation none;
    none.feasible = false;
    none.sum_rate = 0.0;
    none.evaluations = r.evaluations;
    return none;
  }
  CellularAllocation best = detail::cellular_point(r.a, r.b, snrs);
  best.evaluations = r.evaluations;
  return best;
}

// Small LTE-like resource grid, integer blocks per user and time interval.
struct ResourceGrid {
  int n_intervals = 1;
  double delta_f = 1.0;
  double delta_t = 1.0;
  std::vector<std::vector<int>> blocks;  // [user][interval]
  double rate_bps_hz = 0.0;
};

namespace detail {

inline double grid_user_rate(const std::vector<int>& split, double gamma, double delta_f,
                             double delta_t) {
  double rate = 0.0;
  for (int b : split) {
    if (b > 0) rate += static_cast<double>(b) * delta_f * delta_t *
                       std::log2(1.0 + gamma / (static_cast<double>(b) * delta_f));
  }
  return rate;
}

inline void enumerate_splits(int intervals, int remaining, std::vector<int>& current,
                             const std::function<void(const std::vector<int>&)>& emit) {
  if (intervals == 1) {
    current.push_back(remaining);
    emit(current);
    current.pop_back();
    return;
  }
  for (int b = 0; b <= remaining; ++b) {
    current.push_back(b);
    enumerate_splits(intervals - 1, remaining - b, current, emit);
    current.pop_back();
  }
}

}  // namespace detail

// Exhaustive small-instance oracle for block placement across time
// intervals. Users decouple once each carries a fixed block total, so each
// row is optimized independently.
inline ResourceGrid grid_alloc_bruteforce(std::span<const double> gammas, int n_intervals,
                                          int blocks_per_user, double delta_f, double delta_t) {
  if (n_intervals < 1 || n_intervals > 4 || blocks_per_user < 0 || blocks_per_user > 12)
    throw std::invalid_argument("grid_alloc_bruteforce: oracle limited to N^t <= 4, blocks <= 12");
  ResourceGrid grid;
  grid.n_intervals = n_intervals;
  grid.delta_f = delta_f;
  grid.delta_t = delta_t;
  for (double gamma : gammas) {
    std::vector<int> best;
    double best_rate = -1.0;
    std::vector<int> scratch;
    detail::enumerate_splits(n_intervals, blocks_per_user, scratch,
                             [&](const std::vector<int>& split) {
                               const double rate =
                                   detail::grid_user_rate(split, gamma, delta_f, delta_t);
                               if (rate > best_rate) {
                                 best_rate = rate;
                                 best = split;
                               }
                             });
    grid.blocks.push_back(best);
    grid.rate_bps_hz += best_rate;
  }
  return grid;
}

}  // namespace d2d
