#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

namespace d2d {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class WBranch { Principal, MinusOne };

namespace detail {

inline double w_times_exp(double w) { return w * std::exp(w); }

// Bisection on a bracket where f(w) = w e^w - x changes sign, then a couple
// of guarded Newton steps. Slow but provably convergent on both branches.
inline double lambert_bisect(double lo, double hi, double x) {
  double flo = w_times_exp(lo) - x;
  for (int i = 0; i < 200 && hi - lo > 1e-17 * std::max({std::fabs(lo), std::fabs(hi), 1.0}); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = w_times_exp(mid) - x;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double w = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double df = ew * (1.0 + w);
    if (std::fabs(df) < 1e-300) break;  // branch point, bisection result stands
    const double step = f / df;
    const double wn = w - step;
    if (!std::isfinite(wn) || wn < lo - 1.0 || wn > hi + 1.0) break;
    w = wn;
  }
  return w;
}

}  // namespace detail

// Real branches of the inverse of w e^w.
inline double lambert_w(WBranch branch, double x) {
  const double branch_min = -std::exp(-1.0);
  if (branch == WBranch::Principal) {
    if (x < branch_min) throw std::domain_error("lambert_w: principal branch needs x >= -1/e");
    if (x == 0.0) return 0.0;
    if (x <= branch_min * (1.0 - 1e-15)) return -1.0;
    double hi = (x < 1.0) ? 1.0 : std::log(x) + 1.0;
    while (detail::w_times_exp(hi) < x) hi *= 2.0;
    return std::max(detail::lambert_bisect(-1.0, hi, x), -1.0);
  }
  if (x < branch_min || x >= 0.0) throw std::domain_error("lambert_w: -1 branch needs -1/e <= x < 0");
  if (x <= branch_min * (1.0 - 1e-15)) return -1.0;
  // f decreases from 0- toward -1/e as w goes from -inf up to -1.
  double lo = -2.0;
  while (detail::w_times_exp(lo) < x && lo > -746.0) lo *= 2.0;
  return std::min(detail::lambert_bisect(std::max(lo, -746.0), -1.0, x), -1.0);
}

inline double det2(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline double det3(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

// Cramer's rule. Singularity is judged relative to the matrix scale because
// channel-gain coefficients span many orders of magnitude.
inline Vec2 solve_linear_2(const Mat2& a, const Vec2& b) {
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  const double d = det2(a);
  if (scale == 0.0 || std::fabs(d) <= 1e-12 * scale * scale)
    throw std::domain_error("solve_linear_2: singular system");
  return {(b.x * a[1][1] - b.y * a[0][1]) / d, (a[0][0] * b.y - a[1][0] * b.x) / d};
}

inline Vec3 solve_linear_3(const Mat3& a, const Vec3& b) {
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  const double d = det3(a);
  if (scale == 0.0 || std::fabs(d) <= 1e-12 * scale * scale * scale)
    throw std::domain_error("solve_linear_3: singular system");
  const std::array<double, 3> rhs = {b.x, b.y, b.z};
  std::array<double, 3> out{};
  for (int col = 0; col < 3; ++col) {
    Mat3 m = a;
    for (int row = 0; row < 3; ++row) m[row][col] = rhs[row];
    out[col] = det3(m) / d;
  }
  return {out[0], out[1], out[2]};
}

struct SearchResult1D {
  double argmax = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

struct SearchResult2D {
  double a = 0.0;
  double b = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

// Maximizes f on [lo, hi]: dense grid with spacing tol, then golden-section
// refinement around the best cell. Non-finite values are skipped, so callers
// may return -inf to mask points. Not assuming unimodality costs evaluations
// but the objectives swept here are cheap.
template <typename F>
SearchResult1D line_search_max(F&& f, double lo, double hi, double tol) {
  if (!(lo < hi) || !(tol > 0.0)) throw std::invalid_argument("line_search_max: need lo < hi, tol > 0");
  SearchResult1D best;
  auto consider = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (std::isfinite(v) && (v > best.value || (v == best.value && x < best.argmax))) {
      best.value = v;
      best.argmax = x;
    }
  };
  const std::size_t cells =
      std::min<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / tol)), 4'000'000);
  const double step = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i)
    consider(i == cells ? hi : lo + step * static_cast<double>(i));

  double a = std::max(lo, best.argmax - step);
  double b = std::min(hi, best.argmax + step);
  const double inv_phi = 0.6180339887498949;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  while (b - a > 0.25 * tol) {
    const double fc = f(c);
    const double fd = f(d);
    best.evaluations += 2;
    if (std::isfinite(fc) && fc > best.value) { best.value = fc; best.argmax = c; }
    if (std::isfinite(fd) && fd > best.value) { best.value = fd; best.argmax = d; }
    if (!(std::isfinite(fc) && std::isfinite(fd))) break;
    if (fc > fd) b = d; else a = c;
    c = b - (b - a) * inv_phi;
    d = a + (b - a) * inv_phi;
  }
  if (best.evaluations == 0 || !std::isfinite(best.value)) {
    best.argmax = lo;
    best.value = f(lo);
    ++best.evaluations;
  }
  return best;
}

// Maximizes f over the triangular lattice {(i*step, j*step) : a, b >= 0,
// a + b <= 1}. Deterministic lexicographic tie-break on (a, b).
template <typename F>
SearchResult2D grid_search_max_2d(F&& f, double step) {
  if (!(step > 0.0) || !(step < 1.0)) throw std::invalid_argument("grid_search_max_2d: need 0 < step < 1");
  SearchResult2D best;
  const long n = static_cast<long>(std::floor(1.0 / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double a = static_cast<double>(i) * step;
    for (long j = 0; j <= n - i; ++j) {
      const double b = static_cast<double>(j) * step;
      const double v = f(a, b);
      ++best.evaluations;
      if (std::isfinite(v) && v > best.value) {
        best.value = v;
        best.a = a;
        best.b = b;
      }
    }
  }
  return best;
}

}  // namespace d2d
