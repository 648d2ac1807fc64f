#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "feedtrack/simulator.hpp"
#include "feedtrack/tracker.hpp"

namespace feedtrack {

struct NoOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct NfRow {
  int nf = 0;
  int n = 0;  // number of error samples (trajectories)
  TStats stats;
  double detected_fraction = 0.0;
  double precision_trajectory = 0.0;
};

struct EvalReport {
  std::vector<NfRow> rows;          // one per nf in [3, 9]
  double detected_fraction = 0.0;   // at best_nf
  double precision_trajectory = 0.0;
  int best_nf = 0;
};

/// Mean euclidean distance between trajectory points and the ground-truth
/// track over their common frames. Throws NoOverlap.
double trajectory_error(std::span<const TrackPoint> pred, const GroundTruthTrack& gt);

/// Greedy matching: repeatedly pairs the globally closest (prediction, track)
/// by mean distance until nothing remains under the threshold. Returns
/// (prediction index, track index) pairs.
std::vector<std::pair<int, int>> match_tracks(const std::vector<Trajectory>& preds,
                                              const std::vector<GroundTruthTrack>& gts,
                                              double threshold = 50.0);

/// Mean, unbiased std dev, std error, and the two-sided 95% confidence
/// interval from the Student-t critical value. Throws TooFewSamples.
TStats t_statistics(std::span<const double> samples);

/// Two-sided 97.5% t critical value for the given degrees of freedom.
double t_critical_975(int dof);

/// (detected_fraction, precision_trajectory) for a matched tracker output:
/// matched tracks over all tracks, and matched trajectories that terminated
/// inside a ripple box over all matched trajectories.
std::pair<double, double> detection_metrics(const std::vector<Trajectory>& preds,
                                            const std::vector<GroundTruthTrack>& gts,
                                            const std::vector<std::pair<int, int>>& matches);

/// Runs the tracker once per commit count nf in [3, 9] over the scenario
/// (stabilizing first when the scenario carries shake transforms), scoring
/// each matched trajectory on its post-commit points.
EvalReport sweep_nf(const Scenario& scenario, const TrackerConfig& base_cfg);

/// One tracker pass over a scenario's frames, stabilized when applicable.
std::vector<Trajectory> run_tracker(const Scenario& scenario, const TrackerConfig& cfg);

}  // namespace feedtrack
