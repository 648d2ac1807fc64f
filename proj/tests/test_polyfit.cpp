#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "feedtrack/polyfit.hpp"
#include "feedtrack/rng.hpp"

using namespace feedtrack;

namespace {

// Independent oracle: uncentered normal equations X^T X a = X^T y solved by
// Cramer's rule in long double. Deliberately a different route from the
// library's centered solve.
Quadratic oracle_fit_quadratic(const std::vector<Point>& pts) {
  long double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  long double t0 = 0, t1 = 0, t2 = 0;
  for (const Point& p : pts) {
    const long double x = p.x, y = p.y;
    s0 += 1;
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    t0 += y;
    t1 += x * y;
    t2 += x * x * y;
  }
  auto det3 = [](long double a, long double b, long double c, long double d, long double e,
                 long double f, long double g, long double h, long double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const long double D = det3(s0, s1, s2, s1, s2, s3, s2, s3, s4);
  Quadratic q;
  q.a1 = static_cast<double>(det3(t0, s1, s2, t1, s2, s3, t2, s3, s4) / D);
  q.a2 = static_cast<double>(det3(s0, t0, s2, s1, t1, s3, s2, t2, s4) / D);
  q.a3 = static_cast<double>(det3(s0, s1, t0, s1, s2, t1, s2, s3, t2) / D);
  return q;
}

double sse(const Quadratic& q, const std::vector<Point>& pts) {
  double s = 0;
  for (const Point& p : pts) {
    const double r = p.y - eval_poly(q, p.x);
    s += r * r;
  }
  return s;
}

}  // namespace

TEST_CASE("exact parabola and constant data") {
  const std::vector<Point> parabola{{0, 0}, {1, 1}, {2, 4}};
  const Quadratic q = fit_poly(parabola, 2);
  CHECK(q.a1 == doctest::Approx(0).epsilon(1e-9));
  CHECK(q.a2 == doctest::Approx(0).epsilon(1e-9));
  CHECK(q.a3 == doctest::Approx(1).epsilon(1e-9));

  const std::vector<Point> constant{{0, 3}, {1, 3}, {2, 3}};
  const Quadratic c = fit_poly(constant, 2);
  CHECK(c.a1 == doctest::Approx(3));
  CHECK(std::abs(c.a2) < 1e-9);
  CHECK(std::abs(c.a3) < 1e-9);
}

TEST_CASE("noisy fit matches independent normal-equations oracle") {
  SplitMix64 rng(42);
  std::vector<Point> pts;
  for (int i = 0; i < 20; ++i) {
    const double x = i * 3.0;
    pts.emplace_back(x, 2 * x * x - x + 5 + rng.normal());
  }
  const Quadratic q = fit_poly(pts, 2);
  const Quadratic o = oracle_fit_quadratic(pts);
  CHECK(std::abs(q.a1 - o.a1) < 1e-9);
  CHECK(std::abs(q.a2 - o.a2) < 1e-9);
  CHECK(std::abs(q.a3 - o.a3) < 1e-9);
}

TEST_CASE("degree-1 fit leaves the quadratic coefficient at zero") {
  const std::vector<Point> pts{{0, 1}, {1, 3}, {2, 5}, {3, 7.5}};
  const Quadratic q = fit_poly(pts, 1);
  CHECK(q.a3 == 0.0);
  // perturbation check near optimum
  for (double eps : {-1e-3, 1e-3}) {
    Quadratic p = q;
    p.a1 += eps;
    CHECK(sse(q, pts) <= sse(p, pts));
    p = q;
    p.a2 += eps;
    CHECK(sse(q, pts) <= sse(p, pts));
  }
}

TEST_CASE("fitted quadratics are local optima under coefficient perturbation") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> pts;
    const int n = 3 + static_cast<int>(rng.uniform(0, 15));
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(rng.uniform(0, 1000), rng.uniform(-500, 500));
    }
    Quadratic q;
    try {
      q = fit_poly(pts, 2);
    } catch (const SingularSystem&) {
      continue;
    }
    const double base = sse(q, pts);
    for (int coeff = 0; coeff < 3; ++coeff) {
      for (double eps : {-1e-3, 1e-3}) {
        Quadratic p = q;
        (coeff == 0 ? p.a1 : coeff == 1 ? p.a2 : p.a3) += eps;
        CHECK(base <= sse(p, pts) + 1e-12 * std::max(1.0, base));
      }
    }
  }
}

TEST_CASE("exact interpolation through degree+1 points") {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 3; ++i) {
      pts.emplace_back(100.0 * i + rng.uniform(1, 90), rng.uniform(0, 1080));
    }
    const Quadratic q = fit_poly(pts, 2);
    for (const Point& p : pts) CHECK(std::abs(eval_poly(q, p.x) - p.y) < 1e-6);
  }
}

TEST_CASE("translation covariance in y") {
  SplitMix64 rng(5);
  std::vector<Point> pts, shifted;
  const double c = 137.25;
  for (int i = 0; i < 12; ++i) {
    const double x = rng.uniform(0, 1920);
    const double y = rng.uniform(0, 1080);
    pts.emplace_back(x, y);
    shifted.emplace_back(x, y + c);
  }
  const Quadratic a = fit_poly(pts, 2);
  const Quadratic b = fit_poly(shifted, 2);
  CHECK(std::abs((b.a1 - a.a1) - c) < 1e-9 * std::max(1.0, std::abs(c)));
  CHECK(std::abs(b.a2 - a.a2) < 1e-9);
  CHECK(std::abs(b.a3 - a.a3) < 1e-9);
}

TEST_CASE("two points fall back to a line, errors otherwise") {
  const std::vector<Point> two{{0, 0}, {10, 5}};
  const Quadratic q = fit_poly(two, 2);
  CHECK(q.a3 == 0.0);
  CHECK(eval_poly(q, 0) == doctest::Approx(0));
  CHECK(eval_poly(q, 10) == doctest::Approx(5));

  const std::vector<Point> one{{1, 1}};
  CHECK_THROWS_AS(fit_poly(one, 1), InsufficientPoints);
  const std::vector<Point> same_x{{5, 1}, {5, 2}, {5, 3}};
  CHECK_THROWS_AS(fit_poly(same_x, 2), SingularSystem);
  CHECK_THROWS_AS(fit_poly(two, 3), std::invalid_argument);
}

TEST_CASE("eval and tangent") {
  CHECK(eval_poly({0, 0, 1}, 3) == doctest::Approx(9));
  CHECK(eval_poly({5, 0, 0}, 1000) == doctest::Approx(5));
  CHECK(eval_poly({1, 2, 3}, 2) == doctest::Approx(17));

  CHECK(tangent_angle({0, 1, 0}, -5) == doctest::Approx(45));
  CHECK(tangent_angle({0, 1, 0}, 123) == doctest::Approx(45));
  CHECK(tangent_angle({0, 0, 0}, 10) == doctest::Approx(0));
  CHECK(tangent_angle({0, 0, 0.5}, 1) == doctest::Approx(45));
}
