#pragma once

#include <cmath>
#include <stdexcept>

#include "feedtrack/geometry.hpp"

namespace feedtrack {

/// Raw network output for one box, before decoding to absolute pixels.
struct RawPrediction {
  double px = 0.0;  // center offset logits
  double py = 0.0;
  double pw = 0.0;  // log-scale extents
  double ph = 0.0;
  double cell_x = 0.0;  // grid-cell top-left, absolute pixels
  double cell_y = 0.0;
  double confidence = 1.0;

  RawPrediction() = default;
  RawPrediction(double px_, double py_, double pw_, double ph_, double cell_x_, double cell_y_,
                double confidence_ = 1.0)
      : px(px_), py(py_), pw(pw_), ph(ph_), cell_x(cell_x_), cell_y(cell_y_),
        confidence(confidence_) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw std::invalid_argument("RawPrediction: confidence outside [0,1]");
    }
  }
};

struct NonPositiveReference : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Decodes a raw prediction to an absolute box: logistic offsets within the
/// grid cell for the center, exponential scaling of the reference extents.
inline BBox decode_box(const RawPrediction& r, double ref_w, double ref_h) {
  if (ref_w <= 0.0 || ref_h <= 0.0) {
    throw NonPositiveReference("decode_box: reference extents must be positive");
  }
  return BBox(logistic(r.px) + r.cell_x, logistic(r.py) + r.cell_y,
              std::exp(r.pw) * ref_w, std::exp(r.ph) * ref_h);
}

}  // namespace feedtrack
