#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "feedtrack/geometry.hpp"
#include "feedtrack/stabilizer.hpp"

namespace feedtrack {

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
  double frame_w = 1920.0;
  double frame_h = 1080.0;
  int fps = 30;
  int n_frames = 419;

  int n_pellets = 30;        // ignored when pellet_rate > 0
  double pellet_rate = 0.0;  // pellets per frame; overrides n_pellets when positive
  double cut_fraction = 0.9; // launch band is x in [w*cut_fraction, w]

  double flight_frames_mean = 23.8;
  double flight_frames_spread = 4.0;  // flight duration uniform in mean +/- spread
  double gravity = 1.5;               // px/frame^2, y-down positive

  double noise_sigma = 0.0;   // isotropic Gaussian, clamped at 3 sigma
  double dropout_prob = 0.0;
  double clutter_rate = 0.0;  // Poisson mean of false detections per frame

  double pellet_w_min = 9.0, pellet_w_max = 13.0;
  double pellet_h_min = 6.0, pellet_h_max = 36.0;
  double launch_y_min = 150.0, launch_y_max = 350.0;

  double shake_amplitude = 0.0;  // px; 0 disables the shake transform sequence
  double shake_period = 45.0;    // frames per shake cycle
  int smoothing_radius = 30;

  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruthTrack {
  int id = 0;
  int first_frame = 0;
  std::vector<Point> points;  // one per frame from first_frame
  int landing_frame = 0;
  Point landing;

  int last_frame() const { return first_frame + static_cast<int>(points.size()) - 1; }
};

struct Scenario {
  ScenarioConfig config;
  FrameDetections detections;        // per frame, pellets then clutter
  std::vector<RipplePair> ripples;   // per frame
  std::vector<GroundTruthTrack> tracks;
  std::vector<TransformSample> transforms;  // per-frame shake; empty when disabled
};

/// Deterministic ballistic scenario from a seed: pellets launched in the cut
/// band fly a gravity parabola into one of the two ripple boxes; detections
/// add noise, dropout, and clutter. When shake is enabled, detections are
/// offset by the rough component of the camera path (cumulative minus
/// smoothed), so stabilizing with the emitted transforms recovers the clean
/// coordinates.
Scenario generate(const ScenarioConfig& cfg);

}  // namespace feedtrack
