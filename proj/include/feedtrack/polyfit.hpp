#pragma once

#include <span>
#include <stdexcept>

#include "feedtrack/geometry.hpp"

namespace feedtrack {

/// y(x) = a3*x^2 + a2*x + a1.
struct Quadratic {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

struct InsufficientPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares polynomial fit through the normal equations, degree 1 or 2.
/// A degree-2 request with exactly two points falls back to a line.
/// Throws InsufficientPoints or SingularSystem.
Quadratic fit_poly(std::span<const Point> points, int degree);

inline double eval_poly(const Quadratic& q, double x) {
  return (q.a3 * x + q.a2) * x + q.a1;
}

/// Tangent direction atan(dy/dx) at x, in degrees, range (-90, 90).
double tangent_angle(const Quadratic& q, double x);

}  // namespace feedtrack
