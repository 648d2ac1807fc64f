#include "feedtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace feedtrack {

namespace {

std::vector<Point> point_positions(const Trajectory& traj) {
  std::vector<Point> out;
  out.reserve(traj.points.size());
  for (const TrackPoint& p : traj.points) out.push_back(p.pos);
  return out;
}

double surface_y(const RipplePair& ripple) {
  return 0.5 * (ripple.left.cy + ripple.right.cy);
}

// Trailing extrapolated points of a track that ended lost or exited were never
// confirmed by a detection; drop them so the emitted trajectory ends at its
// last corroborated position.
void drop_unconfirmed_tail(Trajectory& traj) {
  while (!traj.points.empty() && traj.points.back().source == PointSource::extrapolated) {
    traj.points.pop_back();
  }
}

}  // namespace

const BBox& target_ripple_box(const Trajectory& traj, const RipplePair& ripple,
                              const TrackerConfig& cfg) {
  if (traj.curve_valid) {
    // Project the landing: where the trajectory curve crosses the ripple band.
    const Quadratic& q = traj.curve;
    const double ys = surface_y(ripple);
    double landing_x = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(q.a3) > 1e-15) {
      const double disc = q.a2 * q.a2 - 4.0 * q.a3 * (q.a1 - ys);
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double r1 = (-q.a2 + sq) / (2.0 * q.a3);
        const double r2 = (-q.a2 - sq) / (2.0 * q.a3);
        // Prefer a root ahead of the motion (x below the last point) and in frame.
        for (double r : {std::min(r1, r2), std::max(r1, r2)}) {
          if (r >= 0.0 && r <= cfg.frame_w && r <= traj.last().pos.x) {
            landing_x = r;
            break;
          }
        }
      }
    } else if (std::abs(q.a2) > 1e-15) {
      const double r = (ys - q.a1) / q.a2;
      if (r >= 0.0 && r <= cfg.frame_w) landing_x = r;
    }
    if (std::isfinite(landing_x)) {
      return std::abs(ripple.left.cx - landing_x) <= std::abs(ripple.right.cx - landing_x)
                 ? ripple.left
                 : ripple.right;
    }
  }
  return ripple.left;
}

std::vector<Trajectory> seed_trajectories(std::span<const Detection> frame_dets,
                                          const RipplePair& ripple, const TrackerConfig& cfg,
                                          std::span<const Detection> all_frame_dets,
                                          int first_id) {
  const double band_lo = cfg.frame_w * cfg.cut_fraction;

  std::vector<const Detection*> seeds;
  for (const Detection& d : frame_dets) {
    if (d.centroid.x >= band_lo && d.centroid.x <= cfg.frame_w) seeds.push_back(&d);
  }
  if (seeds.empty()) return {};

  double min_y = std::numeric_limits<double>::infinity();
  for (const Detection& d : all_frame_dets) min_y = std::min(min_y, d.centroid.y);

  // Deterministic order: rightmost seed first.
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Detection* a, const Detection* b) {
                     return a->centroid.x > b->centroid.x;
                   });

  std::vector<Trajectory> out;
  out.reserve(seeds.size());
  for (const Detection* d : seeds) {
    Trajectory traj;
    traj.id = first_id++;
    traj.seed_frame = d->frame;
    traj.seed_x = d->centroid.x;
    traj.points.push_back({d->frame, d->centroid, PointSource::detected});

    const BBox& target = target_ripple_box(traj, ripple, cfg);
    const auto [alpha, theta] = box_corners(target);
    const Point delta1((alpha.x + cfg.frame_w) * 0.5, min_y);
    traj.max_height_samples.push_back(delta1);

    traj.limits.upper_points = {d->centroid, delta1, alpha};
    traj.limits.lower_points = {d->centroid, theta};
    traj.limits.upper_curve = fit_poly(traj.limits.upper_points, 2);
    traj.limits.lower_curve = fit_poly(traj.limits.lower_points, 2);
    out.push_back(std::move(traj));
  }
  return out;
}

std::vector<Detection> gate_candidates(const Trajectory& traj,
                                       std::span<const Detection> frame_dets,
                                       const TrackerConfig& cfg) {
  const Point& last = traj.last().pos;
  const bool check_angle = traj.points.size() >= 3 && traj.curve_valid;
  // The committed curve is frozen early in the flight; its tangent far outside
  // the fitted window is unreliable, so the angle gate uses a running fit of
  // the points collected so far.
  double tangent = 0.0;
  if (check_angle) {
    Quadratic gating_curve = traj.curve;
    if (traj.state == TrajState::committed) {
      try {
        gating_curve = fit_poly(point_positions(traj), 2);
      } catch (const SingularSystem&) {
      }
    }
    tangent = tangent_angle(gating_curve, last.x);
  }

  // Speed consistency: once the trajectory has an observed inter-frame step,
  // a ballistic pellet cannot move further than max_step_ratio x that step in
  // one frame, nor slower than 1/max_step_ratio x it.
  double max_d2 = std::numeric_limits<double>::infinity();
  double min_d2 = 0.0;
  if (cfg.max_step_ratio > 0.0 && traj.points.size() >= 2) {
    const size_t n = traj.points.size();
    const double step2 = squared_distance(traj.points[n - 1].pos, traj.points[n - 2].pos);
    const double r2 = cfg.max_step_ratio * cfg.max_step_ratio;
    max_d2 = r2 * step2;
    min_d2 = step2 / r2;
  }

  std::vector<Detection> out;
  for (const Detection& d : frame_dets) {
    if (!(d.centroid.x < last.x)) continue;  // travel is toward decreasing x
    const double d2 = squared_distance(last, d.centroid);
    if (d2 > max_d2 || d2 < min_d2) continue;
    const double yu = eval_poly(traj.limits.upper_curve, d.centroid.x);
    const double yl = eval_poly(traj.limits.lower_curve, d.centroid.x);
    if (!(yu <= d.centroid.y && d.centroid.y <= yl)) continue;
    if (check_angle) {
      const double slope = (d.centroid.y - last.y) / (d.centroid.x - last.x);
      const double seg = std::atan(slope) * 180.0 / std::numbers::pi;
      if (std::abs(seg - tangent) > cfg.angle_tolerance_deg) continue;
    }
    out.push_back(d);
  }
  return out;
}

std::optional<Detection> associate(const Trajectory& traj, std::span<const Detection> candidates) {
  if (candidates.empty()) return std::nullopt;
  const Point& last = traj.last().pos;
  const Detection* best = nullptr;
  double best_d2 = 0.0;
  for (const Detection& d : candidates) {
    const double d2 = squared_distance(last, d.centroid);
    if (best == nullptr || d2 < best_d2 ||
        (d2 == best_d2 && (d.centroid.y < best->centroid.y ||
                           (d.centroid.y == best->centroid.y && d.centroid.x < best->centroid.x)))) {
      best = &d;
      best_d2 = d2;
    }
  }
  return *best;
}

void accept_point(Trajectory& traj, const Detection& det,
                  std::span<const Detection> all_frame_dets, const RipplePair& ripple,
                  const TrackerConfig& cfg) {
  traj.points.push_back({det.frame, det.centroid, PointSource::detected});
  traj.consecutive_misses = 0;

  const BBox& target = target_ripple_box(traj, ripple, cfg);
  const auto [alpha, theta] = box_corners(target);

  double min_y = std::numeric_limits<double>::infinity();
  for (const Detection& d : all_frame_dets) min_y = std::min(min_y, d.centroid.y);
  traj.max_height_samples.push_back(Point((alpha.x + cfg.frame_w) * 0.5, min_y));

  Point delta_mean(0.0, 0.0);
  for (const Point& p : traj.max_height_samples) {
    delta_mean.x += p.x;
    delta_mean.y += p.y;
  }
  delta_mean.x /= static_cast<double>(traj.max_height_samples.size());
  delta_mean.y /= static_cast<double>(traj.max_height_samples.size());

  traj.limits.upper_points = point_positions(traj);
  traj.limits.upper_points.push_back(delta_mean);
  traj.limits.upper_points.push_back(alpha);
  traj.limits.upper_curve = fit_poly(traj.limits.upper_points, 2);

  traj.limits.lower_points = {traj.points.front().pos, theta};
  traj.limits.lower_curve = fit_poly(traj.limits.lower_points, 2);

  if (traj.state == TrajState::growing && traj.points.size() >= 3) {
    traj.curve = fit_poly(point_positions(traj), 2);
    traj.curve_valid = true;
    if (static_cast<int>(traj.points.size()) >= cfg.commit_count) {
      traj.state = TrajState::committed;  // curve frozen from here on
    }
  }
}

Point extrapolate(const Trajectory& traj) {
  if (traj.points.size() < 3 || !traj.curve_valid) {
    throw TooFewPoints("extrapolate: need at least 3 points and a fitted curve");
  }
  const size_t n = traj.points.size();
  const double x1 = traj.points[n - 1].pos.x;
  const double x2 = traj.points[n - 2].pos.x;
  const double x3 = traj.points[n - 3].pos.x;
  const double x = 3.0 * x1 - 3.0 * x2 + x3;
  return Point(x, eval_poly(traj.curve, x));
}

void Tracker::step(std::span<const Detection> frame_dets, const RipplePair& ripple, int frame) {
  if (last_frame_ >= 0 && frame != last_frame_ + 1) {
    throw OutOfOrderFrame("Tracker::step: frames must be processed consecutively");
  }
  last_frame_ = frame;

  std::vector<char> claimed(frame_dets.size(), 0);

  auto unclaimed = [&]() {
    std::vector<Detection> out;
    out.reserve(frame_dets.size());
    for (size_t i = 0; i < frame_dets.size(); ++i) {
      if (!claimed[i]) out.push_back(frame_dets[i]);
    }
    return out;
  };

  auto claim = [&](const Detection& d) {
    for (size_t i = 0; i < frame_dets.size(); ++i) {
      if (!claimed[i] && frame_dets[i].centroid.x == d.centroid.x &&
          frame_dets[i].centroid.y == d.centroid.y) {
        claimed[i] = 1;
        return;
      }
    }
  };

  for (Trajectory& traj : trajs_) {
    if (traj.state == TrajState::terminated) continue;

    const std::vector<Detection> avail = unclaimed();
    const std::vector<Detection> cands = gate_candidates(traj, avail, cfg_);
    const std::optional<Detection> chosen = associate(traj, cands);
    if (on_associate) on_associate(traj, cands, chosen ? &*chosen : nullptr);

    if (chosen) {
      claim(*chosen);
      accept_point(traj, *chosen, frame_dets, ripple, cfg_);
    } else if (traj.points.size() >= 3 && traj.curve_valid &&
               traj.consecutive_misses < cfg_.max_misses) {
      const Point p = extrapolate(traj);
      traj.points.push_back({frame, p, PointSource::extrapolated});
      ++traj.consecutive_misses;
    } else {
      traj.state = TrajState::terminated;
      traj.end_reason = EndReason::lost;
      drop_unconfirmed_tail(traj);
      continue;
    }

    const Point& newest = traj.last().pos;
    if (point_in_box(newest, ripple.left) || point_in_box(newest, ripple.right)) {
      traj.state = TrajState::terminated;
      traj.end_reason = EndReason::arrived;
    } else if (newest.x < 0.0 || newest.x > cfg_.frame_w || newest.y < 0.0 ||
               newest.y > cfg_.frame_h) {
      traj.state = TrajState::terminated;
      traj.end_reason = EndReason::exited;
      drop_unconfirmed_tail(traj);
    }
  }

  std::vector<Trajectory> seeded =
      seed_trajectories(unclaimed(), ripple, cfg_, frame_dets, next_id_);
  next_id_ += static_cast<int>(seeded.size());
  for (Trajectory& t : seeded) trajs_.push_back(std::move(t));
}

}  // namespace feedtrack
