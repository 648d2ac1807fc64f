#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedtrack/detector_decode.hpp"
#include "feedtrack/evaluator.hpp"
#include "feedtrack/simulator.hpp"
#include "feedtrack/stabilizer.hpp"
#include "feedtrack/tracker.hpp"

namespace feedtrack::io {

/// Parse failure with the offending file and 1-based line number.
struct FormatError : std::runtime_error {
  FormatError(const std::string& path, int line, const std::string& what_)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what_) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Detections file: `frame cx cy w h class`, class in {nutriment, ripple}.
/// Two ripple rows per frame form the frame's RipplePair; frames without
/// ripple rows inherit the previous pair.
struct DetectionData {
  FrameDetections detections;       // indexed by frame
  std::vector<RipplePair> ripples;  // indexed by frame
};

void write_detections(const std::filesystem::path& path, const FrameDetections& detections,
                      const std::vector<RipplePair>& ripples);
DetectionData read_detections(const std::filesystem::path& path);

void write_transforms(const std::filesystem::path& path,
                      const std::vector<TransformSample>& transforms);
std::vector<TransformSample> read_transforms(const std::filesystem::path& path);

void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthTrack>& tracks);
std::vector<GroundTruthTrack> read_ground_truth(const std::filesystem::path& path);

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

/// Raw predictions file: `frame px py pw ph cell_x cell_y confidence class`.
/// Decodes nutriment and ripple rows to absolute boxes, dropping rows below
/// the confidence threshold.
DetectionData read_raw_predictions(const std::filesystem::path& path, double ref_w, double ref_h,
                                   double confidence_threshold = 0.25);

void write_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report(const std::filesystem::path& path);

/// Plain-text table of the report, one row per nf.
std::string format_report_table(const EvalReport& report);

/// Static SVG of mean error with 95% CI bars per nf.
void write_report_svg(const std::filesystem::path& path, const EvalReport& report);

}  // namespace feedtrack::io
