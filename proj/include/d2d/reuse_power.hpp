#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "d2d/channel.hpp"
#include "d2d/numerics.hpp"

namespace d2d {

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Admissible power polytope. Row r of `plane` holds the SINR-equality plane
// of receiver r as coefficients on (P_T, P_M, P_F) plus the constant term:
// own-signal coefficient positive, interference coefficients and constant
// non-positive. Rows are ordered (DRx, CUE, FUE) like the power axes'
// serving transmitters (DTx, MBS, FAP).
struct PowerRegion {
  std::array<std::array<double, 4>, 3> plane{};
  PowerVector p_max;
  PowerVector p_min;
};

inline PowerRegion build_region(const LinkGains& gains, const SystemParams& params) {
  PowerRegion region;
  region.p_max = {params.p_max_dtx_mw, params.p_max_mbs_mw, params.p_max_fap_mw};
  const double noise = gains.noise_mw;
  for (std::size_t ri = 0; ri < 3; ++ri) {
    const RxId r = static_cast<RxId>(ri);
    const TxId serving = desired_transmitter(r);
    const double threshold = params.sinr_min(r);
    for (std::size_t ti = 0; ti < 3; ++ti) {
      const TxId t = static_cast<TxId>(ti);
      region.plane[ri][ti] =
          (t == serving) ? gains.gain(t, r) : -threshold * gains.gain(t, r);
    }
    region.plane[ri][3] = -threshold * noise;
    const double own = gains.gain(serving, r);
    region.p_min[ri] = own > 0.0 ? threshold * noise / own : std::numeric_limits<double>::infinity();
  }
  return region;
}

inline double plane_value(const PowerRegion& region, std::size_t row, const PowerVector& p) {
  const auto& c = region.plane[row];
  return c[0] * p.p_dtx + c[1] * p.p_mbs + c[2] * p.p_fap + c[3];
}

// Simultaneous solution of the three SINR-equality planes: the smallest
// jointly admissible powers when it lies inside the box.
inline PowerVector joint_min_point(const PowerRegion& region) {
  Mat3 a{};
  Vec3 b{};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) a[r][c] = region.plane[r][c];
  }
  b = {-region.plane[0][3], -region.plane[1][3], -region.plane[2][3]};
  const Vec3 q = solve_linear_3(a, b);  // throws std::domain_error when rank deficient
  const PowerVector p{q.x, q.y, q.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(p[i] > 0.0) || p[i] > region.p_max[i] * (1.0 + 1e-9))
      throw InfeasibleError("joint_min_point: power region is empty");
  }
  return p;
}

// Box plus SINR constraints, with a small relative slack so vertices that
// satisfy a constraint with equality by construction do not flip on round-off.
inline bool is_feasible(const PowerVector& p, const PowerRegion& region, const LinkGains& gains,
                        const SystemParams& params) {
  constexpr double kSlack = 1e-9;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(p[i] >= 0.0) || p[i] > region.p_max[i] * (1.0 + kSlack)) return false;
  }
  for (std::size_t ri = 0; ri < 3; ++ri) {
    const RxId r = static_cast<RxId>(ri);
    if (sinr(p, gains, r) < params.sinr_min(r) * (1.0 - kSlack)) return false;
  }
  return true;
}

inline double sum_rate(const PowerVector& p, const LinkGains& gains) {
  double total = 0.0;
  for (std::size_t ri = 0; ri < 3; ++ri)
    total += std::log2(1.0 + sinr(p, gains, static_cast<RxId>(ri)));
  return total;
}

inline double sum_sinr(const PowerVector& p, const LinkGains& gains) {
  double total = 0.0;
  for (std::size_t ri = 0; ri < 3; ++ri) total += sinr(p, gains, static_cast<RxId>(ri));
  return total;
}

enum class VertexKind { Face, Edge, MaxCorner };

// Candidate with its construction recipe: face points solve planes
// (plane_a, plane_b) with power `axis` held at max; edge points solve
// plane_a for power `axis` with the other two at max.
struct VertexCandidate {
  PowerVector p;
  VertexKind kind = VertexKind::MaxCorner;
  int plane_a = -1;
  int plane_b = -1;
  int axis = -1;
};

// The candidate superset: 9 face points, 9 edge points and the max corner.
// Degenerate sub-systems are skipped, so fewer than 19 may come back.
inline std::vector<VertexCandidate> enumerate_vertices(const PowerRegion& region) {
  std::vector<VertexCandidate> out;
  out.reserve(19);

  for (int axis = 0; axis < 3; ++axis) {
    const int u = axis == 0 ? 1 : 0;
    const int v = axis == 2 ? 1 : 2;
    const std::array<std::array<int, 2>, 3> plane_pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& pair : plane_pairs) {
      const auto& r1 = region.plane[pair[0]];
      const auto& r2 = region.plane[pair[1]];
      const Mat2 a{{{r1[u], r1[v]}, {r2[u], r2[v]}}};
      const Vec2 b{-r1[3] - r1[axis] * region.p_max[axis],
                   -r2[3] - r2[axis] * region.p_max[axis]};
      Vec2 sol;
      try {
        sol = solve_linear_2(a, b);
      } catch (const std::domain_error&) {
        continue;  // parallel planes on this face
      }
      VertexCandidate cand;
      cand.kind = VertexKind::Face;
      cand.plane_a = pair[0];
      cand.plane_b = pair[1];
      cand.axis = axis;
      cand.p[axis] = region.p_max[axis];
      cand.p[u] = sol.x;
      cand.p[v] = sol.y;
      if (std::isfinite(cand.p[u]) && std::isfinite(cand.p[v])) out.push_back(cand);
    }
  }

  for (int plane = 0; plane < 3; ++plane) {
    for (int axis = 0; axis < 3; ++axis) {
      const auto& row = region.plane[plane];
      if (std::fabs(row[axis]) < 1e-300) continue;
      double rhs = -row[3];
      for (int j = 0; j < 3; ++j)
        if (j != axis) rhs -= row[j] * region.p_max[j];
      VertexCandidate cand;
      cand.kind = VertexKind::Edge;
      cand.plane_a = plane;
      cand.axis = axis;
      cand.p = region.p_max;
      cand.p[axis] = rhs / row[axis];
      if (std::isfinite(cand.p[axis])) out.push_back(cand);
    }
  }

  VertexCandidate corner;
  corner.kind = VertexKind::MaxCorner;
  corner.p = region.p_max;
  out.push_back(corner);
  return out;
}

struct ReuseSolution {
  PowerVector powers;
  double sum_rate_bps_hz = 0.0;
  VertexKind vertex_kind = VertexKind::MaxCorner;
  std::size_t candidates_tested = 0;
  bool feasible = false;
};

namespace detail {

inline bool lex_less(const PowerVector& a, const PowerVector& b) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace detail

// Tests the finite candidate set and keeps the best feasible point.
// Infeasibility is reported in the result, not thrown: the framework falls
// back to cellular mode when no candidate survives.
inline ReuseSolution vertex_search(const LinkGains& gains, const SystemParams& params) {
  const PowerRegion region = build_region(gains, params);
  ReuseSolution best;
  for (const VertexCandidate& cand : enumerate_vertices(region)) {
    ++best.candidates_tested;
    if (!is_feasible(cand.p, region, gains, params)) continue;
    const double rate = sum_rate(cand.p, gains);
    if (!best.feasible || rate > best.sum_rate_bps_hz ||
        (rate == best.sum_rate_bps_hz && detail::lex_less(cand.p, best.powers))) {
      best.feasible = true;
      best.sum_rate_bps_hz = rate;
      best.powers = cand.p;
      best.vertex_kind = cand.kind;
    }
  }
  if (!best.feasible) best.sum_rate_bps_hz = 0.0;
  return best;
}

// Brute-force oracle: uniform grid on [p_min, p_max] per axis with the exact
// maximum always included. Deterministic lexicographic tie-break.
inline ReuseSolution exhaustive_search(const LinkGains& gains, const SystemParams& params,
                                       int grid_points_per_dim) {
  if (grid_points_per_dim < 2)
    throw std::invalid_argument("exhaustive_search: need at least 2 grid points per dimension");
  const PowerRegion region = build_region(gains, params);
  std::array<std::vector<double>, 3> axis_values;
  for (std::size_t i = 0; i < 3; ++i) {
    const double hi = region.p_max[i];
    const double lo = std::min(region.p_min[i], hi);
    axis_values[i].resize(static_cast<std::size_t>(grid_points_per_dim));
    for (int k = 0; k < grid_points_per_dim; ++k) {
      axis_values[i][static_cast<std::size_t>(k)] =
          (k == grid_points_per_dim - 1)
              ? hi
              : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points_per_dim - 1);
    }
  }

  // Flattened SINR coefficients keep the inner loop free of indirection.
  std::array<double, 3> own{}, thr{};
  std::array<std::array<double, 3>, 3> cross{};  // cross[rx][tx]
  for (std::size_t ri = 0; ri < 3; ++ri) {
    const RxId r = static_cast<RxId>(ri);
    thr[ri] = params.sinr_min(r);
    for (std::size_t ti = 0; ti < 3; ++ti) {
      const TxId t = static_cast<TxId>(ti);
      if (t == desired_transmitter(r))
        own[ri] = gains.gain(t, r);
      else
        cross[ri][ti] = gains.gain(t, r);
    }
  }
  const double noise = gains.noise_mw;

  ReuseSolution best;
  for (double pt : axis_values[0]) {
    for (double pm : axis_values[1]) {
      for (double pf : axis_values[2]) {
        ++best.candidates_tested;
        const std::array<double, 3> p{pt, pm, pf};
        std::array<double, 3> s{};
        bool ok = true;
        for (std::size_t ri = 0; ri < 3 && ok; ++ri) {
          double interference = noise;
          for (std::size_t ti = 0; ti < 3; ++ti)
            if (ti != ri) interference += p[ti] * cross[ri][ti];
          s[ri] = p[ri] * own[ri] / interference;
          ok = s[ri] >= thr[ri] * (1.0 - 1e-9);
        }
        if (!ok) continue;
        const double rate = std::log2(1.0 + s[0]) + std::log2(1.0 + s[1]) + std::log2(1.0 + s[2]);
        const PowerVector pv{pt, pm, pf};
        if (!best.feasible || rate > best.sum_rate_bps_hz ||
            (rate == best.sum_rate_bps_hz && detail::lex_less(pv, best.powers))) {
          best.feasible = true;
          best.sum_rate_bps_hz = rate;
          best.powers = pv;
        }
      }
    }
  }
  if (!best.feasible) best.sum_rate_bps_hz = 0.0;
  return best;
}

}  // namespace d2d
