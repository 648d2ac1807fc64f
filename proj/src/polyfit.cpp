#include "feedtrack/polyfit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace feedtrack {

namespace {

// Solves the centered normal equations for degree 1: [n S1; S1 S2] b = [Sy; Sxy].
Quadratic fit_linear_centered(std::span<const Point> pts, double mean_x) {
  const double n = static_cast<double>(pts.size());
  double s1 = 0.0, s2 = 0.0, sy = 0.0, sxy = 0.0;
  double scale = 0.0;
  for (const Point& p : pts) {
    const double x = p.x - mean_x;
    scale = std::max(scale, x * x);
    s1 += x;
    s2 += x * x;
    sy += p.y;
    sxy += x * p.y;
  }
  const double det = n * s2 - s1 * s1;
  if (std::abs(det) < 1e-12 * n * std::max(scale, 1e-300)) {
    throw SingularSystem("fit_poly: degenerate x values for degree-1 fit");
  }
  const double b0 = (s2 * sy - s1 * sxy) / det;
  const double b1 = (n * sxy - s1 * sy) / det;
  // un-center: y = b0 + b1*(x - m)
  Quadratic q;
  q.a1 = b0 - b1 * mean_x;
  q.a2 = b1;
  q.a3 = 0.0;
  return q;
}

Quadratic fit_quadratic_centered(std::span<const Point> pts, double mean_x) {
  const double n = static_cast<double>(pts.size());
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double sy = 0, sxy = 0, sx2y = 0;
  double scale = 0.0;
  for (const Point& p : pts) {
    const double x = p.x - mean_x;
    const double x2 = x * x;
    scale = std::max(scale, x2);
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
    sy += p.y;
    sxy += x * p.y;
    sx2y += x2 * p.y;
  }
  // M b = r with M = [[n s1 s2],[s1 s2 s3],[s2 s3 s4]]
  const double m00 = n, m01 = s1, m02 = s2;
  const double m11 = s2, m12 = s3, m22 = s4;
  const double c00 = m11 * m22 - m12 * m12;
  const double c01 = m02 * m12 - m01 * m22;
  const double c02 = m01 * m12 - m02 * m11;
  const double det = m00 * c00 + m01 * c01 + m02 * c02;
  if (std::abs(det) < 1e-12 * n * std::max(scale * scale * scale, 1e-300)) {
    throw SingularSystem("fit_poly: degenerate x values for degree-2 fit");
  }
  const double c11 = m00 * m22 - m02 * m02;
  const double c12 = m02 * m01 - m00 * m12;
  const double c22 = m00 * m11 - m01 * m01;
  const double b0 = (c00 * sy + c01 * sxy + c02 * sx2y) / det;
  const double b1 = (c01 * sy + c11 * sxy + c12 * sx2y) / det;
  const double b2 = (c02 * sy + c12 * sxy + c22 * sx2y) / det;
  // un-center: y = b0 + b1*(x-m) + b2*(x-m)^2
  Quadratic q;
  q.a3 = b2;
  q.a2 = b1 - 2.0 * b2 * mean_x;
  q.a1 = b0 - b1 * mean_x + b2 * mean_x * mean_x;
  return q;
}

}  // namespace

Quadratic fit_poly(std::span<const Point> points, int degree) {
  if (degree != 1 && degree != 2) {
    throw std::invalid_argument("fit_poly: degree must be 1 or 2");
  }
  // Two points cannot determine a parabola; drop to the unique line.
  if (degree == 2 && points.size() == 2) degree = 1;
  if (points.size() < static_cast<size_t>(degree) + 1) {
    throw InsufficientPoints("fit_poly: need at least degree+1 points");
  }

  double mean_x = 0.0;
  for (const Point& p : points) mean_x += p.x;
  mean_x /= static_cast<double>(points.size());

  return degree == 1 ? fit_linear_centered(points, mean_x)
                     : fit_quadratic_centered(points, mean_x);
}

double tangent_angle(const Quadratic& q, double x) {
  return std::atan(2.0 * q.a3 * x + q.a2) * 180.0 / std::numbers::pi;
}

}  // namespace feedtrack
