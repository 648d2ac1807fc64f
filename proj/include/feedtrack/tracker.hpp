#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "feedtrack/geometry.hpp"
#include "feedtrack/polyfit.hpp"

namespace feedtrack {

enum class PointSource { detected, extrapolated };

struct TrackPoint {
  int frame = 0;
  Point pos;
  PointSource source = PointSource::detected;
};

/// Upper and lower limit curves bounding where the next detection may appear.
/// Curves are the fit of their point lists; y-down, so the upper curve has
/// the smaller y at any x.
struct LimitPair {
  std::vector<Point> upper_points;
  std::vector<Point> lower_points;
  Quadratic upper_curve;
  Quadratic lower_curve;
};

enum class TrajState { growing, committed, terminated };

enum class EndReason {
  none,
  arrived,  // newest point fell inside a ripple box
  exited,   // newest point left the frame bounds
  lost,     // too many consecutive misses
};

struct Trajectory {
  int id = 0;
  int seed_frame = 0;
  double seed_x = 0.0;
  std::vector<TrackPoint> points;
  Quadratic curve;          // fit of collected points, valid once >= 3
  bool curve_valid = false;
  LimitPair limits;
  TrajState state = TrajState::growing;
  EndReason end_reason = EndReason::none;
  std::vector<Point> max_height_samples;  // one per accepted point
  int consecutive_misses = 0;

  const TrackPoint& last() const { return points.back(); }
};

struct TrackerConfig {
  double cut_fraction = 0.9;        // seeds gate on x in [w*cut_fraction, w]
  int commit_count = 6;             // accepted points before the curve freezes
  double angle_tolerance_deg = 30.0;
  double max_step_ratio = 2.0;      // candidates whose distance from the last
                                    // point is outside [step/ratio, step*ratio]
                                    // of the last inter-frame step are gated
                                    // out (0 disables)
  int max_misses = 3;               // consecutive extrapolations before lost
  double frame_w = 1920.0;
  double frame_h = 1080.0;

  void validate() const {
    if (!(cut_fraction > 0.0 && cut_fraction < 1.0)) {
      throw std::invalid_argument("TrackerConfig: cut_fraction must be in (0,1)");
    }
    if (commit_count < 3) throw std::invalid_argument("TrackerConfig: commit_count must be >= 3");
    if (max_step_ratio < 0) {
      throw std::invalid_argument("TrackerConfig: max_step_ratio must be >= 0");
    }
    if (max_misses < 0) throw std::invalid_argument("TrackerConfig: max_misses must be >= 0");
    if (frame_w <= 0 || frame_h <= 0) {
      throw std::invalid_argument("TrackerConfig: frame dimensions must be positive");
    }
  }
};

struct MissingRipple : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfOrderFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Picks the ripple box anchoring the limit curves: the box whose center x is
/// nearest the curve's projected landing, or the left box before a curve exists.
const BBox& target_ripple_box(const Trajectory& traj, const RipplePair& ripple,
                              const TrackerConfig& cfg);

/// New trajectories from unclaimed detections inside the cut band.
std::vector<Trajectory> seed_trajectories(std::span<const Detection> frame_dets,
                                          const RipplePair& ripple, const TrackerConfig& cfg,
                                          std::span<const Detection> all_frame_dets,
                                          int first_id = 0);

/// Detections admissible for the next point of a trajectory: inside the limit
/// band at their x (closed bounds), strictly decreasing x, within the
/// tangent-angle tolerance once the trajectory has a curve, and (once a step
/// has been observed) within a max_step_ratio factor of the last inter-frame
/// step distance.
std::vector<Detection> gate_candidates(const Trajectory& traj,
                                       std::span<const Detection> frame_dets,
                                       const TrackerConfig& cfg);

/// Nearest gated candidate to the trajectory's last point (squared euclidean
/// distance; ties broken by smaller y, then smaller x).
std::optional<Detection> associate(const Trajectory& traj, std::span<const Detection> candidates);

/// Appends an associated detection, updates the limit curves and the
/// trajectory fit, and commits the curve at commit_count points.
void accept_point(Trajectory& traj, const Detection& det,
                  std::span<const Detection> all_frame_dets, const RipplePair& ripple,
                  const TrackerConfig& cfg);

/// Predicted next point for a missed frame: constant-acceleration step in x,
/// y read off the trajectory curve.
Point extrapolate(const Trajectory& traj);

/// Frame-by-frame tracking engine. Feed frames in order through step().
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  /// Processes one frame: gate/associate/accept or extrapolate every live
  /// trajectory, then seed new ones from unclaimed cut-band detections.
  void step(std::span<const Detection> frame_dets, const RipplePair& ripple, int frame);

  const std::vector<Trajectory>& trajectories() const { return trajs_; }
  const TrackerConfig& config() const { return cfg_; }

  // Test hook: observes every association decision (candidates after gating
  // and the chosen detection, nullptr when none).
  std::function<void(const Trajectory&, const std::vector<Detection>&, const Detection*)>
      on_associate;

 private:
  TrackerConfig cfg_;
  std::vector<Trajectory> trajs_;
  int last_frame_ = -1;
  int next_id_ = 0;
};

}  // namespace feedtrack
