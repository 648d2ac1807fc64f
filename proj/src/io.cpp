#include "feedtrack/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace feedtrack::io {

namespace {

std::string f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

void expect_header(std::ifstream& in, const std::filesystem::path& path, const std::string& kind) {
  std::string line;
  if (!std::getline(in, line) || line != "# feedtrack " + kind + " v1") {
    throw FormatError(path.string(), 1, "expected header '# feedtrack " + kind + " v1'");
  }
}

struct LineReader {
  std::ifstream in;
  std::string path;
  int line_no = 1;  // header consumed

  bool next(std::istringstream& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      fields = std::istringstream(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(path, line_no, what); }
};

LineReader reader_for(const std::filesystem::path& path, const std::string& kind) {
  LineReader r;
  r.in = open_in(path);
  r.path = path.string();
  expect_header(r.in, path, kind);
  return r;
}

const char* source_name(PointSource s) {
  return s == PointSource::detected ? "detected" : "extrapolated";
}

std::string state_name(const Trajectory& t) {
  switch (t.end_reason) {
    case EndReason::arrived: return "arrived";
    case EndReason::exited: return "exited";
    case EndReason::lost: return "lost";
    case EndReason::none: break;
  }
  return t.state == TrajState::committed ? "committed" : "growing";
}

// Assembles per-frame detection/ripple structures from loose rows.
DetectionData assemble(std::vector<Detection> nutriments,
                       std::map<int, std::vector<BBox>> ripple_rows,
                       const std::string& path) {
  int max_frame = -1;
  for (const Detection& d : nutriments) max_frame = std::max(max_frame, d.frame);
  for (const auto& [f, boxes] : ripple_rows) max_frame = std::max(max_frame, f);
  if (max_frame < 0) throw FormatError(path, 1, "file contains no records");

  DetectionData data;
  data.detections.assign(max_frame + 1, {});
  for (Detection& d : nutriments) data.detections[d.frame].push_back(std::move(d));

  if (ripple_rows.empty()) throw MissingRipple("no ripple boxes in " + path);
  for (const auto& [f, boxes] : ripple_rows) {
    if (boxes.size() != 2) {
      throw FormatError(path, 1, "frame " + std::to_string(f) + " has " +
                                     std::to_string(boxes.size()) + " ripple rows, expected 2");
    }
  }
  // Frames without ripple rows inherit the nearest earlier pair (or the first
  // pair, for frames before it).
  data.ripples.reserve(max_frame + 1);
  for (int f = 0; f <= max_frame; ++f) {
    auto it = ripple_rows.upper_bound(f);
    if (it != ripple_rows.begin()) --it;
    data.ripples.emplace_back(f, it->second[0], it->second[1]);
  }
  return data;
}

}  // namespace

void write_detections(const std::filesystem::path& path, const FrameDetections& detections,
                      const std::vector<RipplePair>& ripples) {
  auto out = open_out(path);
  out << "# feedtrack detections v1\n";
  const size_t n = std::max(detections.size(), ripples.size());
  for (size_t f = 0; f < n; ++f) {
    if (f < detections.size()) {
      for (const Detection& d : detections[f]) {
        out << f << ' ' << f6(d.box.cx) << ' ' << f6(d.box.cy) << ' ' << f6(d.box.w) << ' '
            << f6(d.box.h) << " nutriment\n";
      }
    }
    if (f < ripples.size()) {
      for (const BBox* b : {&ripples[f].left, &ripples[f].right}) {
        out << f << ' ' << f6(b->cx) << ' ' << f6(b->cy) << ' ' << f6(b->w) << ' ' << f6(b->h)
            << " ripple\n";
      }
    }
  }
}

DetectionData read_detections(const std::filesystem::path& path) {
  LineReader r = reader_for(path, "detections");
  std::vector<Detection> nutriments;
  std::map<int, std::vector<BBox>> ripple_rows;
  std::istringstream fields;
  while (r.next(fields)) {
    int frame;
    double cx, cy, w, h;
    std::string cls;
    if (!(fields >> frame >> cx >> cy >> w >> h >> cls)) r.fail("expected: frame cx cy w h class");
    try {
      if (cls == "nutriment") {
        nutriments.push_back(Detection::from_box(frame, BBox(cx, cy, w, h)));
      } else if (cls == "ripple") {
        ripple_rows[frame].emplace_back(cx, cy, w, h);
      } else {
        r.fail("unknown class '" + cls + "'");
      }
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  return assemble(std::move(nutriments), std::move(ripple_rows), r.path);
}

void write_transforms(const std::filesystem::path& path,
                      const std::vector<TransformSample>& transforms) {
  auto out = open_out(path);
  out << "# feedtrack transforms v1\n";
  for (size_t f = 0; f < transforms.size(); ++f) {
    out << f << ' ' << f6(transforms[f].dx) << ' ' << f6(transforms[f].dy) << ' '
        << f6(transforms[f].da) << '\n';
  }
}

std::vector<TransformSample> read_transforms(const std::filesystem::path& path) {
  LineReader r = reader_for(path, "transforms");
  std::vector<TransformSample> out;
  std::istringstream fields;
  while (r.next(fields)) {
    int frame;
    TransformSample t;
    if (!(fields >> frame >> t.dx >> t.dy >> t.da)) r.fail("expected: frame dx dy da");
    if (frame != static_cast<int>(out.size())) r.fail("transform frames must be consecutive from 0");
    out.push_back(t);
  }
  return out;
}

void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthTrack>& tracks) {
  auto out = open_out(path);
  out << "# feedtrack groundtruth v1\n";
  for (const GroundTruthTrack& t : tracks) {
    for (size_t i = 0; i < t.points.size(); ++i) {
      out << t.id << ' ' << (t.first_frame + static_cast<int>(i)) << ' ' << f6(t.points[i].x)
          << ' ' << f6(t.points[i].y) << '\n';
    }
  }
}

std::vector<GroundTruthTrack> read_ground_truth(const std::filesystem::path& path) {
  LineReader r = reader_for(path, "groundtruth");
  std::map<int, GroundTruthTrack> by_id;
  std::istringstream fields;
  while (r.next(fields)) {
    int id, frame;
    double x, y;
    if (!(fields >> id >> frame >> x >> y)) r.fail("expected: id frame x y");
    auto [it, inserted] = by_id.try_emplace(id);
    GroundTruthTrack& t = it->second;
    if (inserted) {
      t.id = id;
      t.first_frame = frame;
    } else if (frame != t.first_frame + static_cast<int>(t.points.size())) {
      r.fail("track " + std::to_string(id) + " frames must be consecutive");
    }
    t.points.emplace_back(x, y);
  }
  std::vector<GroundTruthTrack> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) {
    t.landing_frame = t.last_frame();
    t.landing = t.points.back();
    out.push_back(std::move(t));
  }
  return out;
}

void write_trajectories(const std::filesystem::path& path,
                        const std::vector<Trajectory>& trajectories) {
  auto out = open_out(path);
  out << "# feedtrack trajectories v1\n";
  for (const Trajectory& t : trajectories) {
    const std::string state = state_name(t);
    for (const TrackPoint& p : t.points) {
      out << t.id << ' ' << p.frame << ' ' << f6(p.pos.x) << ' ' << f6(p.pos.y) << ' '
          << source_name(p.source) << ' ' << f6(t.curve.a1) << ' ' << f6(t.curve.a2) << ' '
          << f6(t.curve.a3) << ' ' << state << '\n';
    }
  }
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  LineReader r = reader_for(path, "trajectories");
  std::map<int, Trajectory> by_id;
  std::istringstream fields;
  while (r.next(fields)) {
    int id, frame;
    double x, y;
    std::string source, state;
    Quadratic q;
    if (!(fields >> id >> frame >> x >> y >> source >> q.a1 >> q.a2 >> q.a3 >> state)) {
      r.fail("expected: traj_id frame x y source a1 a2 a3 state");
    }
    auto [it, inserted] = by_id.try_emplace(id);
    Trajectory& t = it->second;
    if (inserted) {
      t.id = id;
      t.seed_frame = frame;
      t.seed_x = x;
      t.curve = q;
      if (state == "arrived") {
        t.state = TrajState::terminated;
        t.end_reason = EndReason::arrived;
      } else if (state == "exited") {
        t.state = TrajState::terminated;
        t.end_reason = EndReason::exited;
      } else if (state == "lost") {
        t.state = TrajState::terminated;
        t.end_reason = EndReason::lost;
      } else if (state == "committed") {
        t.state = TrajState::committed;
      } else if (state == "growing") {
        t.state = TrajState::growing;
      } else {
        r.fail("unknown state '" + state + "'");
      }
    }
    PointSource src;
    if (source == "detected") {
      src = PointSource::detected;
    } else if (source == "extrapolated") {
      src = PointSource::extrapolated;
    } else {
      r.fail("unknown source '" + source + "'");
    }
    t.points.push_back({frame, Point(x, y), src});
  }
  std::vector<Trajectory> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) {
    t.curve_valid = t.points.size() >= 3;
    out.push_back(std::move(t));
  }
  return out;
}

DetectionData read_raw_predictions(const std::filesystem::path& path, double ref_w, double ref_h,
                                   double confidence_threshold) {
  LineReader r = reader_for(path, "rawpred");
  std::vector<Detection> nutriments;
  std::map<int, std::vector<BBox>> ripple_rows;
  std::istringstream fields;
  while (r.next(fields)) {
    int frame;
    RawPrediction raw;
    std::string cls;
    if (!(fields >> frame >> raw.px >> raw.py >> raw.pw >> raw.ph >> raw.cell_x >> raw.cell_y >>
          raw.confidence >> cls)) {
      r.fail("expected: frame px py pw ph cell_x cell_y confidence class");
    }
    if (raw.confidence < confidence_threshold) continue;
    try {
      const BBox box = decode_box(raw, ref_w, ref_h);
      if (cls == "nutriment") {
        nutriments.push_back(Detection::from_box(frame, box));
      } else if (cls == "ripple") {
        ripple_rows[frame].push_back(box);
      } else {
        r.fail("unknown class '" + cls + "'");
      }
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  return assemble(std::move(nutriments), std::move(ripple_rows), r.path);
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_out(path);
  out << "# feedtrack report v1\n";
  for (const NfRow& row : report.rows) {
    out << "row " << row.nf << ' ' << row.n << ' ' << f6(row.stats.mean) << ' '
        << f6(row.stats.std_dev) << ' ' << f6(row.stats.std_error) << ' ' << f6(row.stats.ci_low)
        << ' ' << f6(row.stats.ci_high) << ' ' << f6(row.detected_fraction) << ' '
        << f6(row.precision_trajectory) << '\n';
  }
  out << "summary " << f6(report.detected_fraction) << ' ' << f6(report.precision_trajectory)
      << ' ' << report.best_nf << '\n';
}

EvalReport read_report(const std::filesystem::path& path) {
  LineReader r = reader_for(path, "report");
  EvalReport report;
  std::istringstream fields;
  while (r.next(fields)) {
    std::string tag;
    fields >> tag;
    if (tag == "row") {
      NfRow row;
      if (!(fields >> row.nf >> row.n >> row.stats.mean >> row.stats.std_dev >>
            row.stats.std_error >> row.stats.ci_low >> row.stats.ci_high >>
            row.detected_fraction >> row.precision_trajectory)) {
        r.fail("malformed row record");
      }
      report.rows.push_back(row);
    } else if (tag == "summary") {
      if (!(fields >> report.detected_fraction >> report.precision_trajectory >>
            report.best_nf)) {
        r.fail("malformed summary record");
      }
    } else {
      r.fail("unknown record '" + tag + "'");
    }
  }
  return report;
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "nf   n    mean(px)   std(px)    stderr(px) ci_low(px) ci_high(px)\n";
  char buf[160];
  for (const NfRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-4d %-4d %-10.2f %-10.2f %-10.2f %-10.2f %-10.2f\n", row.nf,
                  row.n, row.stats.mean, row.stats.std_dev, row.stats.std_error, row.stats.ci_low,
                  row.stats.ci_high);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "best_nf %d  detected_fraction %.4f  precision_trajectory %.4f\n", report.best_nf,
                report.detected_fraction, report.precision_trajectory);
  out << buf;
  return out.str();
}

void write_report_svg(const std::filesystem::path& path, const EvalReport& report) {
  auto out = open_out(path);
  const double width = 480, height = 320, ml = 60, mr = 20, mt = 20, mb = 40;
  double y_max = 1.0;
  for (const NfRow& row : report.rows) {
    if (row.n >= 2 && std::isfinite(row.stats.ci_high)) y_max = std::max(y_max, row.stats.ci_high);
    else if (std::isfinite(row.stats.mean)) y_max = std::max(y_max, row.stats.mean);
  }
  y_max *= 1.1;

  auto sx = [&](double nf) { return ml + (nf - 3.0) / 6.0 * (width - ml - mr); };
  auto sy = [&](double v) { return height - mb - v / y_max * (height - mt - mb); };

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  out << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
      << height - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
      << "' stroke='black'/>\n";
  for (const NfRow& row : report.rows) {
    if (!std::isfinite(row.stats.mean)) continue;
    const double x = sx(row.nf);
    if (row.n >= 2) {
      out << "<line x1='" << x << "' y1='" << sy(row.stats.ci_low) << "' x2='" << x << "' y2='"
          << sy(row.stats.ci_high) << "' stroke='steelblue' stroke-width='2'/>\n";
    }
    out << "<circle cx='" << x << "' cy='" << sy(row.stats.mean) << "' r='4' fill='steelblue'/>\n";
    out << "<text x='" << x << "' y='" << height - mb + 18
        << "' text-anchor='middle' font-size='12'>" << row.nf << "</text>\n";
  }
  out << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 6
      << "' text-anchor='middle' font-size='12'>nf</text>\n";
  out << "<text x='14' y='" << (mt + height - mb) / 2
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 14 "
      << (mt + height - mb) / 2 << ")'>mean error (px)</text>\n";
  out << "</svg>\n";
}

}  // namespace feedtrack::io
