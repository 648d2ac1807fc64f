#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "feedtrack/geometry.hpp"

namespace feedtrack {

/// Per-frame rigid motion: translation in pixels, rotation in radians.
struct TransformSample {
  double dx = 0.0;
  double dy = 0.0;
  double da = 0.0;
};

struct StabilizationConfig {
  int smoothing_radius = 30;
  // Divide the window sum by the nominal radius instead of the in-window
  // sample count. Retained for study only; drifts at a constant rate.
  bool literal_radius_norm = false;
};

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrameOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using FrameDetections = std::vector<std::vector<Detection>>;

/// Running componentwise sum of per-frame transforms (the camera path L).
std::vector<TransformSample> cumulative_trajectory(std::span<const TransformSample> transforms);

/// Smoothed camera path chi built by the recurrence
///   chi[k] = chi[k-1] + mean(L over [k-r, k+r]) - L[k-1],   chi[0] = L[0],
/// with the window clamped to valid indices.
std::vector<TransformSample> smooth_trajectory(std::span<const TransformSample> L,
                                               const StabilizationConfig& cfg);

/// Applies the per-frame correction (chi - L) to detection coordinates:
/// rotation about the frame center, then translation. Box sizes are untouched.
FrameDetections apply_stabilization(const FrameDetections& detections,
                                    std::span<const TransformSample> chi,
                                    std::span<const TransformSample> L,
                                    double frame_w, double frame_h);

}  // namespace feedtrack
