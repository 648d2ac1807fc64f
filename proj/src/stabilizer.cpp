#include "feedtrack/stabilizer.hpp"

#include <algorithm>
#include <cmath>

namespace feedtrack {

std::vector<TransformSample> cumulative_trajectory(std::span<const TransformSample> transforms) {
  if (transforms.empty()) throw EmptyInput("cumulative_trajectory: empty input");
  std::vector<TransformSample> out;
  out.reserve(transforms.size());
  TransformSample acc;
  for (const TransformSample& t : transforms) {
    acc.dx += t.dx;
    acc.dy += t.dy;
    acc.da += t.da;
    out.push_back(acc);
  }
  return out;
}

std::vector<TransformSample> smooth_trajectory(std::span<const TransformSample> L,
                                               const StabilizationConfig& cfg) {
  if (L.empty()) throw EmptyInput("smooth_trajectory: empty input");
  if (cfg.smoothing_radius < 1) throw std::invalid_argument("smoothing_radius must be >= 1");

  const int n = static_cast<int>(L.size());
  const int r = cfg.smoothing_radius;

  auto window_mean = [&](int k) {
    const int lo = std::max(0, k - r);
    const int hi = std::min(n - 1, k + r);
    TransformSample sum;
    for (int i = lo; i <= hi; ++i) {
      sum.dx += L[i].dx;
      sum.dy += L[i].dy;
      sum.da += L[i].da;
    }
    const double norm = cfg.literal_radius_norm ? static_cast<double>(r)
                                                : static_cast<double>(hi - lo + 1);
    return TransformSample{sum.dx / norm, sum.dy / norm, sum.da / norm};
  };

  std::vector<TransformSample> chi(L.size());
  chi[0] = L[0];
  for (int k = 1; k < n; ++k) {
    const TransformSample m = window_mean(k);
    chi[k].dx = chi[k - 1].dx + m.dx - L[k - 1].dx;
    chi[k].dy = chi[k - 1].dy + m.dy - L[k - 1].dy;
    chi[k].da = chi[k - 1].da + m.da - L[k - 1].da;
  }
  return chi;
}

FrameDetections apply_stabilization(const FrameDetections& detections,
                                    std::span<const TransformSample> chi,
                                    std::span<const TransformSample> L,
                                    double frame_w, double frame_h) {
  if (chi.size() != L.size()) {
    throw std::invalid_argument("apply_stabilization: chi and L length mismatch");
  }
  if (detections.size() > chi.size()) {
    throw FrameOutOfRange("apply_stabilization: detections extend past transform sequence");
  }

  const double ccx = 0.5 * frame_w;
  const double ccy = 0.5 * frame_h;

  FrameDetections out;
  out.reserve(detections.size());
  for (size_t f = 0; f < detections.size(); ++f) {
    const double tx = chi[f].dx - L[f].dx;
    const double ty = chi[f].dy - L[f].dy;
    const double ta = chi[f].da - L[f].da;
    const double ca = std::cos(ta);
    const double sa = std::sin(ta);

    std::vector<Detection> frame_out;
    frame_out.reserve(detections[f].size());
    for (const Detection& d : detections[f]) {
      const double ox = d.centroid.x - ccx;
      const double oy = d.centroid.y - ccy;
      const double nx = ccx + ox * ca - oy * sa + tx;
      const double ny = ccy + ox * sa + oy * ca + ty;
      frame_out.emplace_back(d.frame, Point(nx, ny), BBox(nx, ny, d.box.w, d.box.h), d.id);
    }
    out.push_back(std::move(frame_out));
  }
  return out;
}

}  // namespace feedtrack
