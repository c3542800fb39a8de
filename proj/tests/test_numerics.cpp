#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "d2d/numerics.hpp"

using namespace d2d;

namespace {

// Independent root finder used to freeze expected Lambert values.
double bisect_w(double target, double lo, double hi) {
  auto f = [&](double w) { return w * std::exp(w) - target; };
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = f(mid);
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("lambert_w branch point and trivial values") {
  CHECK(lambert_w(WBranch::MinusOne, -std::exp(-1.0)) == Approx(-1.0).margin(1e-12));
  CHECK(lambert_w(WBranch::Principal, -std::exp(-1.0)) == Approx(-1.0).margin(1e-12));
  CHECK(lambert_w(WBranch::Principal, 0.0) == 0.0);
}

TEST_CASE("lambert_w minus-one branch against bisection oracle") {
  const double expected = bisect_w(-0.1, -50.0, -1.0);
  CHECK(expected == Approx(-3.577152063957297).epsilon(1e-12));
  CHECK(lambert_w(WBranch::MinusOne, -0.1) == Approx(expected).epsilon(1e-10));
}

TEST_CASE("lambert_w domain errors") {
  CHECK_THROWS_AS(lambert_w(WBranch::Principal, -0.4), std::domain_error);
  CHECK_THROWS_AS(lambert_w(WBranch::MinusOne, 0.0), std::domain_error);
  CHECK_THROWS_AS(lambert_w(WBranch::MinusOne, 0.5), std::domain_error);
  CHECK_THROWS_AS(lambert_w(WBranch::MinusOne, -0.4), std::domain_error);
}

TEST_CASE("lambert_w residual and branch range over random inputs") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double branch_min = -std::exp(-1.0);
  for (int i = 0; i < 10000; ++i) {
    const double xm = branch_min * u01(gen);  // in (branch_min, 0]
    if (xm < 0.0) {
      const double w = lambert_w(WBranch::MinusOne, xm);
      CHECK(w <= -1.0);
      CHECK(std::fabs(w * std::exp(w) - xm) <= 1e-12 * std::fabs(xm));
    }
    const double xp = branch_min + u01(gen) * 10.0;  // in [-1/e, -1/e + 10)
    const double wp = lambert_w(WBranch::Principal, xp);
    CHECK(wp >= -1.0);
    if (xp != 0.0) CHECK(std::fabs(wp * std::exp(wp) - xp) <= 1e-12 * std::fabs(xp));
  }
}

TEST_CASE("solve_linear_3 basic cases") {
  const Mat3 id{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const Vec3 r = solve_linear_3(id, {1, 2, 3});
  CHECK(r.x == Approx(1.0));
  CHECK(r.y == Approx(2.0));
  CHECK(r.z == Approx(3.0));

  const Mat3 diag{{{2, 0, 0}, {0, 4, 0}, {0, 0, 5}}};
  const Vec3 s = solve_linear_3(diag, {2, 4, 5});
  CHECK(s.x == Approx(1.0));
  CHECK(s.y == Approx(1.0));
  CHECK(s.z == Approx(1.0));

  const Mat3 rank2{{{1, 2, 3}, {1, 2, 3}, {0, 1, 1}}};
  CHECK_THROWS_AS(solve_linear_3(rank2, {1, 1, 1}), std::domain_error);
}

TEST_CASE("solve_linear_3 residual on random well-conditioned systems") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    Mat3 a{};
    Vec3 b{u(gen) * 10, u(gen) * 10, u(gen) * 10};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = u(gen);
      a[i][i] += 4.0;  // diagonally dominant, hence well conditioned
    }
    const Vec3 x = solve_linear_3(a, b);
    const double xs[3] = {x.x, x.y, x.z};
    const double bs[3] = {b.x, b.y, b.z};
    for (int i = 0; i < 3; ++i) {
      double lhs = 0.0, scale = std::fabs(bs[i]);
      for (int j = 0; j < 3; ++j) {
        lhs += a[i][j] * xs[j];
        scale = std::max(scale, std::fabs(a[i][j] * xs[j]));
      }
      CHECK(std::fabs(lhs - bs[i]) <= 1e-9 * std::max(scale, 1e-30));
    }
  }
}

TEST_CASE("solve_linear_2 cases") {
  const Mat2 id{{{1, 0}, {0, 1}}};
  const Vec2 r = solve_linear_2(id, {5, 7});
  CHECK(r.x == Approx(5.0));
  CHECK(r.y == Approx(7.0));

  // Hand substitution: x + y = 2, x - y = 0.
  const Mat2 a{{{1, 1}, {1, -1}}};
  const Vec2 s = solve_linear_2(a, {2, 0});
  CHECK(s.x == Approx(1.0));
  CHECK(s.y == Approx(1.0));

  const Mat2 sing{{{1, 1}, {2, 2}}};
  CHECK_THROWS_AS(solve_linear_2(sing, {1, 1}), std::domain_error);
}

TEST_CASE("line_search_max on a known quadratic") {
  const auto r = line_search_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-6);
  CHECK(r.argmax == Approx(0.3).margin(1e-6));
  CHECK(r.value == Approx(0.0).margin(1e-10));
  CHECK(r.evaluations >= 1);
}

TEST_CASE("line_search_max on a constant") {
  const auto r = line_search_max([](double) { return 2.5; }, 0.0, 1.0, 1e-4);
  CHECK(r.value == 2.5);
  CHECK(r.argmax >= 0.0);
  CHECK(r.argmax <= 1.0);
}

TEST_CASE("line_search_max finds the boundary max of x*log2(1 + 4/x)") {
  auto f = [](double x) { return x * std::log2(1.0 + 4.0 / x); };
  // The derivative stays positive on (0, 1]: check on a sample grid.
  for (double x = 0.05; x <= 1.0; x += 0.05) {
    const double h = 1e-7;
    CHECK((f(x + h) - f(x - h)) / (2 * h) > 0.0);
  }
  const auto r = line_search_max(f, 1e-9, 1.0, 1e-6);
  CHECK(r.argmax == Approx(1.0).margin(1e-5));
}

TEST_CASE("line_search_max finds the vertex of random concave quadratics") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    const double peak = u(gen);
    const double curvature = 0.5 + 10.0 * u(gen);
    const double tol = 1e-5;
    const auto r =
        line_search_max([&](double x) { return -curvature * (x - peak) * (x - peak); }, 0.0, 1.0, tol);
    CHECK(std::fabs(r.argmax - peak) <= tol);
  }
}

TEST_CASE("grid_search_max_2d basic cases") {
  const auto r = grid_search_max_2d(
      [](double a, double b) { return -(a - 0.25) * (a - 0.25) - (b - 0.25) * (b - 0.25); }, 0.01);
  CHECK(r.a == Approx(0.25).margin(0.011));
  CHECK(r.b == Approx(0.25).margin(0.011));

  const auto lin = grid_search_max_2d([](double a, double b) { return a + b; }, 0.1);
  CHECK(lin.a + lin.b == Approx(1.0).margin(1e-9));
}

TEST_CASE("grid_search_max_2d skips non-finite points") {
  const auto r = grid_search_max_2d(
      [](double a, double b) {
        if (a + b > 0.5) return -std::numeric_limits<double>::infinity();
        return a + b;
      },
      0.05);
  CHECK(r.value == Approx(0.5).margin(1e-12));
}
