#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace feedtrack {

/// Image-plane point. x grows rightward, y grows downward.
struct Point {
  double x = 0.0;
  double y = 0.0;

  Point() = default;
  Point(double x_, double y_) : x(x_), y(y_) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("Point: non-finite coordinate");
    }
  }
};

inline double squared_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

/// Axis-aligned box stored as center plus extents, all in pixels.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  BBox() = default;
  BBox(double cx_, double cy_, double w_, double h_) : cx(cx_), cy(cy_), w(w_), h(h_) {
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
      throw std::invalid_argument("BBox: non-finite field");
    }
    if (w <= 0.0 || h <= 0.0) {
      throw std::invalid_argument("BBox: width and height must be positive");
    }
  }

  Point center() const { return Point(cx, cy); }

  static BBox from_corners(const Point& top_left, const Point& bottom_right) {
    return BBox(0.5 * (top_left.x + bottom_right.x), 0.5 * (top_left.y + bottom_right.y),
                bottom_right.x - top_left.x, bottom_right.y - top_left.y);
  }
};

/// (top-left, bottom-right) corners of a box.
inline std::pair<Point, Point> box_corners(const BBox& box) {
  return {Point(box.cx - 0.5 * box.w, box.cy - 0.5 * box.h),
          Point(box.cx + 0.5 * box.w, box.cy + 0.5 * box.h)};
}

/// Closed-boundary membership test.
inline bool point_in_box(const Point& p, const BBox& box) {
  const auto [tl, br] = box_corners(box);
  return tl.x <= p.x && p.x <= br.x && tl.y <= p.y && p.y <= br.y;
}

/// One observed pellet in one frame. The centroid is the box center.
struct Detection {
  int frame = 0;
  Point centroid;
  BBox box;
  std::string id;

  Detection() = default;
  Detection(int frame_, const Point& centroid_, const BBox& box_, std::string id_ = {})
      : frame(frame_), centroid(centroid_), box(box_), id(std::move(id_)) {
    if (frame < 0) throw std::invalid_argument("Detection: negative frame index");
    if (std::abs(centroid.x - box.cx) > 1e-9 || std::abs(centroid.y - box.cy) > 1e-9) {
      throw std::invalid_argument("Detection: centroid does not match box center");
    }
  }

  static Detection from_box(int frame, const BBox& box, std::string id = {}) {
    return Detection(frame, box.center(), box, std::move(id));
  }
};

/// The two ripple-area boxes for one frame, left has the smaller center x.
struct RipplePair {
  int frame = 0;
  BBox left;
  BBox right;

  RipplePair() = default;
  RipplePair(int frame_, const BBox& a, const BBox& b) : frame(frame_) {
    if (a.cx <= b.cx) {
      left = a;
      right = b;
    } else {
      left = b;
      right = a;
    }
  }
};

}  // namespace feedtrack
