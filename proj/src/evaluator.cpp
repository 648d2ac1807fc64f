#include "feedtrack/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace feedtrack {

namespace {

// Two-sided 97.5% Student-t quantiles for dof 1..120.
constexpr double kT975[120] = {
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912,
    2.364624, 2.306004, 2.262157, 2.228139, 2.200985, 2.178813,
    2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922,
    2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899,
    2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272,
    2.039513, 2.036933, 2.034515, 2.032245, 2.030108, 2.028094,
    2.026192, 2.024394, 2.022691, 2.021075, 2.019541, 2.018082,
    2.016692, 2.015368, 2.014103, 2.012896, 2.011741, 2.010635,
    2.009575, 2.008559, 2.007584, 2.006647, 2.005746, 2.004879,
    2.004045, 2.003241, 2.002465, 2.001717, 2.000995, 2.000298,
    1.999624, 1.998972, 1.998341, 1.997730, 1.997138, 1.996564,
    1.996008, 1.995469, 1.994945, 1.994437, 1.993943, 1.993464,
    1.992997, 1.992543, 1.992102, 1.991673, 1.991254, 1.990847,
    1.990450, 1.990063, 1.989686, 1.989319, 1.988960, 1.988610,
    1.988268, 1.987934, 1.987608, 1.987290, 1.986979, 1.986675,
    1.986377, 1.986086, 1.985802, 1.985523, 1.985251, 1.984984,
    1.984723, 1.984467, 1.984217, 1.983972, 1.983731, 1.983495,
    1.983264, 1.983038, 1.982815, 1.982597, 1.982383, 1.982173,
    1.981967, 1.981765, 1.981567, 1.981372, 1.981180, 1.980992,
    1.980808, 1.980626, 1.980448, 1.980272, 1.980100, 1.979930,
};

// Error samples over points from the commit index on; empty when the
// trajectory never committed or has no post-commit overlap with gt.
std::vector<double> post_commit_distances(const Trajectory& traj, const GroundTruthTrack& gt,
                                          int commit_count) {
  std::vector<double> out;
  for (size_t i = static_cast<size_t>(commit_count); i < traj.points.size(); ++i) {
    const TrackPoint& p = traj.points[i];
    const int t = p.frame - gt.first_frame;
    if (t < 0 || t >= static_cast<int>(gt.points.size())) continue;
    out.push_back(distance(p.pos, gt.points[t]));
  }
  return out;
}

}  // namespace

double trajectory_error(std::span<const TrackPoint> pred, const GroundTruthTrack& gt) {
  double sum = 0.0;
  int n = 0;
  for (const TrackPoint& p : pred) {
    const int t = p.frame - gt.first_frame;
    if (t < 0 || t >= static_cast<int>(gt.points.size())) continue;
    sum += distance(p.pos, gt.points[t]);
    ++n;
  }
  if (n == 0) throw NoOverlap("trajectory_error: no common frames");
  return sum / static_cast<double>(n);
}

std::vector<std::pair<int, int>> match_tracks(const std::vector<Trajectory>& preds,
                                              const std::vector<GroundTruthTrack>& gts,
                                              double threshold) {
  struct Entry {
    double err;
    int pred;
    int gt;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < static_cast<int>(preds.size()); ++i) {
    for (int j = 0; j < static_cast<int>(gts.size()); ++j) {
      try {
        const double err = trajectory_error(preds[i].points, gts[j]);
        if (err <= threshold) entries.push_back({err, i, j});
      } catch (const NoOverlap&) {
      }
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.err != b.err) return a.err < b.err;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });

  std::vector<char> pred_used(preds.size(), 0), gt_used(gts.size(), 0);
  std::vector<std::pair<int, int>> matches;
  for (const Entry& e : entries) {
    if (pred_used[e.pred] || gt_used[e.gt]) continue;
    pred_used[e.pred] = 1;
    gt_used[e.gt] = 1;
    matches.emplace_back(e.pred, e.gt);
  }
  return matches;
}

double t_critical_975(int dof) {
  if (dof < 1) throw std::invalid_argument("t_critical_975: dof must be >= 1");
  if (dof > 120) return 1.959964;
  return kT975[dof - 1];
}

TStats t_statistics(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw TooFewSamples("t_statistics: need at least 2 samples");

  TStats s;
  for (double v : samples) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(ss / (n - 1));
  s.std_error = s.std_dev / std::sqrt(static_cast<double>(n));
  const double t = t_critical_975(n - 1);
  s.ci_low = s.mean - t * s.std_error;
  s.ci_high = s.mean + t * s.std_error;
  return s;
}

std::pair<double, double> detection_metrics(const std::vector<Trajectory>& preds,
                                            const std::vector<GroundTruthTrack>& gts,
                                            const std::vector<std::pair<int, int>>& matches) {
  const double detected =
      gts.empty() ? 0.0 : static_cast<double>(matches.size()) / static_cast<double>(gts.size());
  int arrived = 0;
  for (const auto& [pi, gi] : matches) {
    if (preds[pi].end_reason == EndReason::arrived) ++arrived;
  }
  const double precision =
      matches.empty() ? 0.0 : static_cast<double>(arrived) / static_cast<double>(matches.size());
  return {detected, precision};
}

std::vector<Trajectory> run_tracker(const Scenario& scenario, const TrackerConfig& cfg) {
  const FrameDetections* dets = &scenario.detections;
  FrameDetections stabilized;
  if (!scenario.transforms.empty()) {
    const auto L = cumulative_trajectory(scenario.transforms);
    const auto chi = smooth_trajectory(L, StabilizationConfig{scenario.config.smoothing_radius});
    stabilized = apply_stabilization(scenario.detections, chi, L, cfg.frame_w, cfg.frame_h);
    dets = &stabilized;
  }

  Tracker tracker(cfg);
  for (int f = 0; f < static_cast<int>(dets->size()); ++f) {
    tracker.step((*dets)[f], scenario.ripples[f], f);
  }
  return tracker.trajectories();
}

EvalReport sweep_nf(const Scenario& scenario, const TrackerConfig& base_cfg) {
  EvalReport report;
  report.best_nf = 0;
  double best_mean = std::numeric_limits<double>::infinity();

  for (int nf = 3; nf <= 9; ++nf) {
    TrackerConfig cfg = base_cfg;
    cfg.commit_count = nf;
    const std::vector<Trajectory> preds = run_tracker(scenario, cfg);
    const auto matches = match_tracks(preds, scenario.tracks);

    std::vector<double> samples;
    for (const auto& [pi, gi] : matches) {
      const auto dists = post_commit_distances(preds[pi], scenario.tracks[gi], nf);
      if (dists.empty()) continue;
      double sum = 0.0;
      for (double d : dists) sum += d;
      samples.push_back(sum / static_cast<double>(dists.size()));
    }

    NfRow row;
    row.nf = nf;
    row.n = static_cast<int>(samples.size());
    if (samples.size() >= 2) {
      row.stats = t_statistics(samples);
    } else if (samples.size() == 1) {
      row.stats.mean = samples[0];
    } else {
      row.stats.mean = std::numeric_limits<double>::quiet_NaN();
    }
    const auto [detected, precision] = detection_metrics(preds, scenario.tracks, matches);
    row.detected_fraction = detected;
    row.precision_trajectory = precision;
    report.rows.push_back(row);

    if (row.n > 0 && row.stats.mean < best_mean) {
      best_mean = row.stats.mean;
      report.best_nf = nf;
      report.detected_fraction = detected;
      report.precision_trajectory = precision;
    }
  }
  return report;
}

}  // namespace feedtrack
