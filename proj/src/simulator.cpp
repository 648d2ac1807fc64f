#include "feedtrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "feedtrack/rng.hpp"

namespace feedtrack {

void ScenarioConfig::validate() const {
  if (frame_w <= 0 || frame_h <= 0) throw InvalidConfig("frame dimensions must be positive");
  if (n_frames < 1) throw InvalidConfig("n_frames must be >= 1");
  if (fps < 1) throw InvalidConfig("fps must be >= 1");
  if (n_pellets < 0) throw InvalidConfig("n_pellets must be >= 0");
  if (pellet_rate < 0) throw InvalidConfig("pellet_rate must be >= 0");
  if (!(cut_fraction > 0.0 && cut_fraction < 1.0)) throw InvalidConfig("cut_fraction must be in (0,1)");
  if (flight_frames_mean <= 0 || flight_frames_spread < 0 ||
      flight_frames_spread >= flight_frames_mean) {
    throw InvalidConfig("flight duration distribution is degenerate");
  }
  if (gravity < 0) throw InvalidConfig("gravity must be >= 0");
  if (noise_sigma < 0) throw InvalidConfig("noise_sigma must be >= 0");
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) throw InvalidConfig("dropout_prob must be in [0,1]");
  if (clutter_rate < 0) throw InvalidConfig("clutter_rate must be >= 0");
  if (pellet_w_min <= 0 || pellet_h_min <= 0 || pellet_w_max < pellet_w_min ||
      pellet_h_max < pellet_h_min) {
    throw InvalidConfig("pellet size range is invalid");
  }
  if (shake_amplitude < 0) throw InvalidConfig("shake_amplitude must be >= 0");
  if (shake_amplitude > 0 && shake_period <= 0) throw InvalidConfig("shake_period must be positive");
  if (smoothing_radius < 1) throw InvalidConfig("smoothing_radius must be >= 1");
}

namespace {

struct Pellet {
  GroundTruthTrack track;
  double box_w = 0.0;
  double box_h = 0.0;
};

RipplePair ripple_pair_for(const ScenarioConfig& cfg, int frame) {
  const double cy = cfg.frame_h - 130.0;
  const double bw = cfg.frame_w * 0.15625;
  return RipplePair(frame, BBox(cfg.frame_w * 0.18, cy, bw, 100.0),
                    BBox(cfg.frame_w * 0.39, cy, bw, 100.0));
}

Pellet make_pellet(int id, const ScenarioConfig& cfg, const RipplePair& ripple, SplitMix64& rng,
                   double launch_lo, double launch_hi) {
  Pellet p;
  p.track.id = id;

  p.track.first_frame = static_cast<int>(rng.uniform(launch_lo, launch_hi));

  const double band_lo = cfg.frame_w * cfg.cut_fraction;
  const double x0 = rng.uniform(band_lo + 10.0, cfg.frame_w - 10.0);
  const double y0 = rng.uniform(cfg.launch_y_min, cfg.launch_y_max);
  const double flight = rng.uniform(cfg.flight_frames_mean - cfg.flight_frames_spread,
                                    cfg.flight_frames_mean + cfg.flight_frames_spread);
  const BBox& target = (rng.next() & 1) ? ripple.right : ripple.left;
  // Land well inside the box so the nearest integer frame is still contained.
  const double land_x = rng.uniform(target.cx - target.w / 3.0, target.cx + target.w / 3.0);
  const double land_y = rng.uniform(target.cy - target.h / 5.0, target.cy + target.h / 5.0);

  const double vx = (land_x - x0) / flight;
  const double vy = (land_y - y0 - 0.5 * cfg.gravity * flight * flight) / flight;

  p.box_w = rng.uniform(cfg.pellet_w_min, cfg.pellet_w_max);
  p.box_h = rng.uniform(cfg.pellet_h_min, cfg.pellet_h_max);

  const int t_max = static_cast<int>(3.0 * flight) + 20;
  p.track.landing_frame = -1;
  for (int t = 0; t <= t_max; ++t) {
    const int frame = p.track.first_frame + t;
    if (frame >= cfg.n_frames) break;
    const Point pos(x0 + vx * t, y0 + vy * t + 0.5 * cfg.gravity * t * t);
    p.track.points.push_back(pos);
    if (point_in_box(pos, ripple.left) || point_in_box(pos, ripple.right)) {
      p.track.landing_frame = frame;
      p.track.landing = pos;
      break;
    }
  }
  if (p.track.landing_frame < 0 && !p.track.points.empty()) {
    // Video ended mid-flight; treat the last sampled point as the landing.
    p.track.landing_frame = p.track.last_frame();
    p.track.landing = p.track.points.back();
  }
  return p;
}

std::vector<TransformSample> shake_transforms(const ScenarioConfig& cfg) {
  std::vector<TransformSample> out(cfg.n_frames);
  double prev_dx = 0.0, prev_dy = 0.0;
  for (int f = 0; f < cfg.n_frames; ++f) {
    const double ph = 2.0 * std::numbers::pi * static_cast<double>(f) / cfg.shake_period;
    const double px = cfg.shake_amplitude * std::sin(ph);
    const double py = 0.6 * cfg.shake_amplitude * std::sin(ph + std::numbers::pi / 3.0);
    out[f] = {px - prev_dx, py - prev_dy, 0.0};
    prev_dx = px;
    prev_dy = py;
  }
  return out;
}

}  // namespace

Scenario generate(const ScenarioConfig& cfg) {
  cfg.validate();

  Scenario sc;
  sc.config = cfg;
  SplitMix64 rng(cfg.seed);

  sc.ripples.reserve(cfg.n_frames);
  for (int f = 0; f < cfg.n_frames; ++f) sc.ripples.push_back(ripple_pair_for(cfg, f));

  const int n_pellets = cfg.pellet_rate > 0.0
                            ? std::max(1, static_cast<int>(std::lround(cfg.pellet_rate * cfg.n_frames)))
                            : cfg.n_pellets;

  // Launch frames are stratified: each pellet draws from the middle of its own
  // slot of the usable launch window, so launches never coincide when the
  // window has room for them.
  const double latest_launch = static_cast<double>(std::max(1, cfg.n_frames - 45));
  const double slot = latest_launch / std::max(1, n_pellets);

  std::vector<Pellet> pellets;
  pellets.reserve(n_pellets);
  for (int i = 0; i < n_pellets; ++i) {
    const double lo = i * slot + 0.15 * slot;
    const double hi = i * slot + 0.85 * slot;
    pellets.push_back(make_pellet(i, cfg, sc.ripples.front(), rng, lo, hi));
    sc.tracks.push_back(pellets.back().track);
  }

  const double clamp3 = 3.0 * cfg.noise_sigma;
  sc.detections.assign(cfg.n_frames, {});
  for (int f = 0; f < cfg.n_frames; ++f) {
    std::vector<Detection>& dets = sc.detections[f];
    for (const Pellet& p : pellets) {
      const int t = f - p.track.first_frame;
      if (t < 0 || t >= static_cast<int>(p.track.points.size())) continue;
      if (cfg.dropout_prob > 0.0 && rng.uniform01() < cfg.dropout_prob) continue;
      Point pos = p.track.points[t];
      if (cfg.noise_sigma > 0.0) {
        pos.x += std::clamp(rng.normal() * cfg.noise_sigma, -clamp3, clamp3);
        pos.y += std::clamp(rng.normal() * cfg.noise_sigma, -clamp3, clamp3);
      }
      dets.emplace_back(f, pos, BBox(pos.x, pos.y, p.box_w, p.box_h),
                        "p" + std::to_string(p.track.id));
    }
    const int n_clutter = rng.poisson(cfg.clutter_rate);
    for (int c = 0; c < n_clutter; ++c) {
      const double x = rng.uniform(5.0, cfg.frame_w - 5.0);
      const double y = rng.uniform(5.0, cfg.frame_h - 5.0);
      const double bw = rng.uniform(cfg.pellet_w_min, cfg.pellet_w_max);
      const double bh = rng.uniform(cfg.pellet_h_min, cfg.pellet_h_max);
      dets.emplace_back(f, Point(x, y), BBox(x, y, bw, bh), "clutter");
    }
  }

  if (cfg.shake_amplitude > 0.0) {
    sc.transforms = shake_transforms(cfg);
    const std::vector<TransformSample> L = cumulative_trajectory(sc.transforms);
    const std::vector<TransformSample> chi =
        smooth_trajectory(L, StabilizationConfig{cfg.smoothing_radius});
    for (int f = 0; f < cfg.n_frames; ++f) {
      const double ox = L[f].dx - chi[f].dx;
      const double oy = L[f].dy - chi[f].dy;
      for (Detection& d : sc.detections[f]) {
        const Point pos(d.centroid.x + ox, d.centroid.y + oy);
        d = Detection(d.frame, pos, BBox(pos.x, pos.y, d.box.w, d.box.h), d.id);
      }
    }
  }

  return sc;
}

}  // namespace feedtrack
