#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "feedtrack/evaluator.hpp"
#include "feedtrack/io.hpp"
#include "feedtrack/simulator.hpp"
#include "feedtrack/stabilizer.hpp"
#include "feedtrack/tracker.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

namespace fs = std::filesystem;
using namespace feedtrack;

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw io::IoError("input file not found: " + path);
}

struct SimulateOpts {
  ScenarioConfig cfg;
  std::string detections_out;
  std::string ground_truth_out;
  std::string transforms_out;
};

int run_simulate(const SimulateOpts& o) {
  const Scenario sc = generate(o.cfg);
  io::write_detections(o.detections_out, sc.detections, sc.ripples);
  io::write_ground_truth(o.ground_truth_out, sc.tracks);
  if (!o.transforms_out.empty()) {
    if (sc.transforms.empty()) {
      std::cerr << "note: shake disabled, writing empty transform sequence padding\n";
      io::write_transforms(o.transforms_out,
                           std::vector<TransformSample>(o.cfg.n_frames));
    } else {
      io::write_transforms(o.transforms_out, sc.transforms);
    }
  }
  std::cout << "simulated " << sc.config.n_frames << " frames, " << sc.tracks.size()
            << " pellets\n";
  return kExitOk;
}

struct TrackOpts {
  std::string detections_in;
  std::string raw_in;
  std::string transforms_in;
  std::string trajectories_out;
  TrackerConfig cfg;
  StabilizationConfig stab;
  double ref_w = 11.0;
  double ref_h = 21.0;
  double confidence_threshold = 0.25;
};

int run_track(const TrackOpts& o) {
  io::DetectionData data;
  if (!o.raw_in.empty()) {
    require_input(o.raw_in);
    data = io::read_raw_predictions(o.raw_in, o.ref_w, o.ref_h, o.confidence_threshold);
  } else {
    require_input(o.detections_in);
    data = io::read_detections(o.detections_in);
  }

  if (!o.transforms_in.empty()) {
    require_input(o.transforms_in);
    const auto transforms = io::read_transforms(o.transforms_in);
    if (transforms.size() < data.detections.size()) {
      throw FrameOutOfRange("transform file covers fewer frames than the detections");
    }
    const auto L = cumulative_trajectory(transforms);
    const auto chi = smooth_trajectory(L, o.stab);
    data.detections =
        apply_stabilization(data.detections, chi, L, o.cfg.frame_w, o.cfg.frame_h);
  }

  Tracker tracker(o.cfg);
  for (int f = 0; f < static_cast<int>(data.detections.size()); ++f) {
    tracker.step(data.detections[f], data.ripples[f], f);
  }
  io::write_trajectories(o.trajectories_out, tracker.trajectories());
  std::cout << "tracked " << data.detections.size() << " frames, "
            << tracker.trajectories().size() << " trajectories\n";
  return kExitOk;
}

struct EvalOpts {
  std::string trajectories_in;
  std::string ground_truth_in;
  std::string report_out;
  double match_threshold = 50.0;
};

int run_eval(const EvalOpts& o) {
  require_input(o.trajectories_in);
  require_input(o.ground_truth_in);
  const auto preds = io::read_trajectories(o.trajectories_in);
  const auto gts = io::read_ground_truth(o.ground_truth_in);
  const auto matches = match_tracks(preds, gts, o.match_threshold);

  std::vector<double> samples;
  for (const auto& [pi, gi] : matches) {
    try {
      samples.push_back(trajectory_error(preds[pi].points, gts[gi]));
    } catch (const NoOverlap&) {
      std::cerr << "trajectory " << preds[pi].id << ": no overlap with track " << gts[gi].id
                << ", skipped\n";
    }
  }

  EvalReport report;
  NfRow row;
  row.nf = 0;  // single fixed-config evaluation, not a sweep row
  row.n = static_cast<int>(samples.size());
  if (samples.size() >= 2) {
    row.stats = t_statistics(samples);
  } else if (samples.size() == 1) {
    row.stats.mean = samples[0];
  }
  const auto [detected, precision] = detection_metrics(preds, gts, matches);
  row.detected_fraction = detected;
  row.precision_trajectory = precision;
  report.rows.push_back(row);
  report.detected_fraction = detected;
  report.precision_trajectory = precision;
  report.best_nf = 0;

  if (!o.report_out.empty()) io::write_report(o.report_out, report);
  std::cout << io::format_report_table(report);
  return kExitOk;
}

struct SweepOpts {
  std::string detections_in;
  std::string ground_truth_in;
  std::string transforms_in;
  std::string report_out;
  std::string svg_out;
  TrackerConfig cfg;
  StabilizationConfig stab;
};

int run_sweep(const SweepOpts& o) {
  require_input(o.detections_in);
  require_input(o.ground_truth_in);
  const auto data = io::read_detections(o.detections_in);

  Scenario sc;
  sc.detections = data.detections;
  sc.ripples = data.ripples;
  sc.tracks = io::read_ground_truth(o.ground_truth_in);
  sc.config.frame_w = o.cfg.frame_w;
  sc.config.frame_h = o.cfg.frame_h;
  sc.config.n_frames = static_cast<int>(data.detections.size());
  sc.config.smoothing_radius = o.stab.smoothing_radius;
  if (!o.transforms_in.empty()) {
    require_input(o.transforms_in);
    sc.transforms = io::read_transforms(o.transforms_in);
  }

  const EvalReport report = sweep_nf(sc, o.cfg);
  if (!o.report_out.empty()) io::write_report(o.report_out, report);
  if (!o.svg_out.empty()) io::write_report_svg(o.svg_out, report);
  std::cout << io::format_report_table(report);
  return kExitOk;
}

void add_tracker_flags(CLI::App* cmd, TrackerConfig& cfg, StabilizationConfig& stab) {
  cmd->add_option("--cut-fraction", cfg.cut_fraction, "Seed band lower bound as fraction of width");
  cmd->add_option("--nf", cfg.commit_count, "Accepted points before the curve commits");
  cmd->add_option("--angle-tolerance", cfg.angle_tolerance_deg, "Gating angle tolerance, degrees");
  cmd->add_option("--max-misses", cfg.max_misses, "Consecutive extrapolations before a track is lost");
  cmd->add_option("--frame-w", cfg.frame_w, "Frame width, pixels");
  cmd->add_option("--frame-h", cfg.frame_h, "Frame height, pixels");
  cmd->add_option("--smoothing-radius", stab.smoothing_radius, "Stabilizer smoothing radius, frames");
  cmd->add_flag("--literal-radius-norm", stab.literal_radius_norm,
                "Normalize smoothing windows by the nominal radius (study mode)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedtrack: ballistic pellet tracking by trajectory mapping"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Generate a synthetic ballistic scenario");
  c_sim->add_option("--detections", sim.detections_out, "Output detections file")->required();
  c_sim->add_option("--ground-truth", sim.ground_truth_out, "Output ground-truth file")->required();
  c_sim->add_option("--transforms", sim.transforms_out, "Output shake transform file");
  c_sim->add_option("--seed", sim.cfg.seed, "RNG seed");
  c_sim->add_option("--n-frames", sim.cfg.n_frames, "Number of frames");
  c_sim->add_option("--n-pellets", sim.cfg.n_pellets, "Number of pellets");
  c_sim->add_option("--pellet-rate", sim.cfg.pellet_rate, "Pellets per frame (overrides --n-pellets)");
  c_sim->add_option("--frame-w", sim.cfg.frame_w, "Frame width, pixels");
  c_sim->add_option("--frame-h", sim.cfg.frame_h, "Frame height, pixels");
  c_sim->add_option("--fps", sim.cfg.fps, "Frame rate");
  c_sim->add_option("--noise-sigma", sim.cfg.noise_sigma, "Detection noise sigma, pixels");
  c_sim->add_option("--dropout", sim.cfg.dropout_prob, "Per-detection dropout probability");
  c_sim->add_option("--clutter-rate", sim.cfg.clutter_rate, "False detections per frame (Poisson mean)");
  c_sim->add_option("--gravity", sim.cfg.gravity, "Gravity, px/frame^2");
  c_sim->add_option("--flight-frames", sim.cfg.flight_frames_mean, "Mean flight duration, frames");
  c_sim->add_option("--shake-amplitude", sim.cfg.shake_amplitude, "Camera shake amplitude, pixels");
  c_sim->add_option("--shake-period", sim.cfg.shake_period, "Camera shake period, frames");
  c_sim->add_option("--smoothing-radius", sim.cfg.smoothing_radius, "Smoothing radius used for shake");

  TrackOpts trk;
  CLI::App* c_trk = app.add_subcommand("track", "Run the tracker over a detections file");
  c_trk->add_option("--detections", trk.detections_in, "Input detections file");
  c_trk->add_option("--raw-predictions", trk.raw_in, "Input raw prediction file (decoded first)");
  c_trk->add_option("--transforms", trk.transforms_in, "Input transform file (enables stabilization)");
  c_trk->add_option("--out", trk.trajectories_out, "Output trajectory file")->required();
  c_trk->add_option("--ref-w", trk.ref_w, "Reference width for raw box decoding");
  c_trk->add_option("--ref-h", trk.ref_h, "Reference height for raw box decoding");
  c_trk->add_option("--confidence-threshold", trk.confidence_threshold,
                    "Minimum confidence for raw predictions");
  add_tracker_flags(c_trk, trk.cfg, trk.stab);

  EvalOpts ev;
  CLI::App* c_ev = app.add_subcommand("eval", "Score trajectories against ground truth");
  c_ev->add_option("--trajectories", ev.trajectories_in, "Input trajectory file")->required();
  c_ev->add_option("--ground-truth", ev.ground_truth_in, "Input ground-truth file")->required();
  c_ev->add_option("--out", ev.report_out, "Output report file");
  c_ev->add_option("--match-threshold", ev.match_threshold, "Matching threshold, pixels");

  SweepOpts sw;
  CLI::App* c_sw = app.add_subcommand("sweep", "Evaluate commit counts nf in [3,9]");
  c_sw->add_option("--detections", sw.detections_in, "Input detections file")->required();
  c_sw->add_option("--ground-truth", sw.ground_truth_in, "Input ground-truth file")->required();
  c_sw->add_option("--transforms", sw.transforms_in, "Input transform file (enables stabilization)");
  c_sw->add_option("--out", sw.report_out, "Output report file");
  c_sw->add_option("--svg", sw.svg_out, "Output SVG of mean error with CI per nf");
  add_tracker_flags(c_sw, sw.cfg, sw.stab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_trk->parsed()) {
      if (trk.detections_in.empty() == trk.raw_in.empty()) {
        std::cerr << "error: exactly one of --detections / --raw-predictions is required\n";
        return kExitValidation;
      }
      return run_track(trk);
    }
    if (c_ev->parsed()) return run_eval(ev);
    if (c_sw->parsed()) return run_sweep(sw);
  } catch (const io::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const io::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const MissingRipple& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FrameOutOfRange& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
