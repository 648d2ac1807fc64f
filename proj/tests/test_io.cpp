#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "feedtrack/io.hpp"

using namespace feedtrack;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("feedtrack_io_test_" + name);
  fs::remove(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

bool message_has(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("detections round-trip at six decimals") {
  FrameDetections dets(3);
  dets[0].push_back(Detection::from_box(0, BBox(100.1234565, 200.5, 10.25, 20.75)));
  dets[2].push_back(Detection::from_box(2, BBox(55.125, 66.25, 9, 6)));
  dets[2].push_back(Detection::from_box(2, BBox(77.5, 88.875, 13, 36)));
  std::vector<RipplePair> ripples;
  for (int f = 0; f < 3; ++f) {
    ripples.emplace_back(f, BBox(345.6, 950.0, 300.0, 100.0), BBox(748.8, 950.0, 300.0, 100.0));
  }

  const fs::path p = tmp_file("det_roundtrip.txt");
  io::write_detections(p, dets, ripples);
  const io::DetectionData back = io::read_detections(p);

  REQUIRE(back.detections.size() == 3);
  REQUIRE(back.ripples.size() == 3);
  for (size_t f = 0; f < 3; ++f) {
    REQUIRE(back.detections[f].size() == dets[f].size());
    for (size_t i = 0; i < dets[f].size(); ++i) {
      CHECK(std::abs(back.detections[f][i].box.cx - dets[f][i].box.cx) < 5e-7);
      CHECK(std::abs(back.detections[f][i].box.cy - dets[f][i].box.cy) < 5e-7);
      CHECK(std::abs(back.detections[f][i].box.w - dets[f][i].box.w) < 5e-7);
      CHECK(std::abs(back.detections[f][i].box.h - dets[f][i].box.h) < 5e-7);
      CHECK(back.detections[f][i].frame == static_cast<int>(f));
    }
    CHECK(std::abs(back.ripples[f].left.cx - 345.6) < 5e-7);
    CHECK(std::abs(back.ripples[f].right.cx - 748.8) < 5e-7);
  }
}

TEST_CASE("frames without ripple rows inherit the nearest earlier pair") {
  const fs::path p = tmp_file("det_inherit.txt");
  write_text(p,
             "# feedtrack detections v1\n"
             "0 100.0 200.0 10.0 20.0 nutriment\n"
             "0 345.6 950.0 300.0 100.0 ripple\n"
             "0 748.8 950.0 300.0 100.0 ripple\n"
             "3 90.0 210.0 10.0 20.0 nutriment\n"
             "5 80.0 220.0 10.0 20.0 nutriment\n"
             "5 400.0 950.0 300.0 100.0 ripple\n"
             "5 800.0 950.0 300.0 100.0 ripple\n");
  const io::DetectionData data = io::read_detections(p);
  REQUIRE(data.ripples.size() == 6);
  for (int f = 0; f <= 4; ++f) CHECK(data.ripples[f].left.cx == doctest::Approx(345.6));
  CHECK(data.ripples[5].left.cx == doctest::Approx(400.0));
  CHECK(data.detections[3].size() == 1);
  CHECK(data.detections[4].empty());
}

TEST_CASE("detections with no ripple rows are rejected") {
  const fs::path p = tmp_file("det_noripple.txt");
  write_text(p,
             "# feedtrack detections v1\n"
             "0 100.0 200.0 10.0 20.0 nutriment\n");
  CHECK_THROWS_AS(io::read_detections(p), MissingRipple);
}

TEST_CASE("format errors carry the file and line number") {
  const fs::path p = tmp_file("det_badclass.txt");
  write_text(p,
             "# feedtrack detections v1\n"
             "0 100.0 200.0 10.0 20.0 nutriment\n"
             "0 1.0 2.0 3.0 4.0 pebble\n");
  try {
    io::read_detections(p);
    FAIL("expected FormatError");
  } catch (const io::FormatError& e) {
    CHECK(message_has(e, p.string()));
    CHECK(message_has(e, ":3:"));
    CHECK(message_has(e, "pebble"));
  }

  const fs::path h = tmp_file("det_badheader.txt");
  write_text(h, "# something else\n0 1.0 2.0 3.0 4.0 nutriment\n");
  try {
    io::read_detections(h);
    FAIL("expected FormatError");
  } catch (const io::FormatError& e) {
    CHECK(message_has(e, ":1:"));
  }
}

TEST_CASE("short and malformed rows are rejected with positions") {
  const fs::path p = tmp_file("det_short.txt");
  write_text(p,
             "# feedtrack detections v1\n"
             "\n"
             "# a comment line is fine\n"
             "0 100.0 200.0 nutriment\n");
  try {
    io::read_detections(p);
    FAIL("expected FormatError");
  } catch (const io::FormatError& e) {
    CHECK(message_has(e, ":4:"));
  }
}

TEST_CASE("missing files raise IoError") {
  CHECK_THROWS_AS(io::read_detections(tmp_file("nonexistent.txt")), io::IoError);
  CHECK_THROWS_AS(io::read_transforms(tmp_file("nonexistent.txt")), io::IoError);
}

TEST_CASE("transforms round-trip and enforce consecutive frames") {
  std::vector<TransformSample> ts{{1.5, -2.25, 0.001}, {0.0, 0.0, 0.0}, {-3.125, 4.0, -0.02}};
  const fs::path p = tmp_file("transforms.txt");
  io::write_transforms(p, ts);
  const auto back = io::read_transforms(p);
  REQUIRE(back.size() == ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(back[i].dx - ts[i].dx) < 5e-7);
    CHECK(std::abs(back[i].dy - ts[i].dy) < 5e-7);
    CHECK(std::abs(back[i].da - ts[i].da) < 5e-7);
  }

  const fs::path bad = tmp_file("transforms_gap.txt");
  write_text(bad,
             "# feedtrack transforms v1\n"
             "0 1.0 2.0 0.0\n"
             "2 1.0 2.0 0.0\n");
  CHECK_THROWS_AS(io::read_transforms(bad), io::FormatError);
}

TEST_CASE("ground truth round-trips") {
  std::vector<GroundTruthTrack> tracks(2);
  tracks[0].id = 0;
  tracks[0].first_frame = 7;
  tracks[0].points = {{1800.5, 250.25}, {1740.125, 260.0}, {1680.0, 275.5}};
  tracks[1].id = 3;
  tracks[1].first_frame = 50;
  tracks[1].points = {{1750.0, 300.0}, {1690.0, 320.0}};
  for (auto& t : tracks) {
    t.landing_frame = t.last_frame();
    t.landing = t.points.back();
  }

  const fs::path p = tmp_file("gt.txt");
  io::write_ground_truth(p, tracks);
  const auto back = io::read_ground_truth(p);
  REQUIRE(back.size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(back[k].id == tracks[k].id);
    CHECK(back[k].first_frame == tracks[k].first_frame);
    REQUIRE(back[k].points.size() == tracks[k].points.size());
    for (size_t i = 0; i < tracks[k].points.size(); ++i) {
      CHECK(std::abs(back[k].points[i].x - tracks[k].points[i].x) < 5e-7);
      CHECK(std::abs(back[k].points[i].y - tracks[k].points[i].y) < 5e-7);
    }
    CHECK(back[k].landing_frame == tracks[k].landing_frame);
  }

  const fs::path bad = tmp_file("gt_gap.txt");
  write_text(bad,
             "# feedtrack groundtruth v1\n"
             "0 7 1.0 2.0\n"
             "0 9 3.0 4.0\n");
  CHECK_THROWS_AS(io::read_ground_truth(bad), io::FormatError);
}

TEST_CASE("trajectories round-trip states, sources, and curves") {
  std::vector<Trajectory> trajs(2);
  trajs[0].id = 0;
  trajs[0].seed_frame = 4;
  trajs[0].seed_x = 1800.0;
  trajs[0].curve = {0.001, -1.25, 900.5};
  trajs[0].curve_valid = true;
  trajs[0].points = {{4, {1800.0, 250.0}, PointSource::detected},
                     {5, {1740.0, 262.5}, PointSource::detected},
                     {6, {1680.0, 280.125}, PointSource::extrapolated}};
  trajs[0].state = TrajState::terminated;
  trajs[0].end_reason = EndReason::arrived;
  trajs[1].id = 2;
  trajs[1].seed_frame = 9;
  trajs[1].seed_x = 1850.0;
  trajs[1].curve = {0.0, 0.0, 0.0};
  trajs[1].points = {{9, {1850.0, 300.0}, PointSource::detected},
                     {10, {1790.0, 310.0}, PointSource::detected}};
  trajs[1].state = TrajState::growing;

  const fs::path p = tmp_file("trajs.txt");
  io::write_trajectories(p, trajs);
  const auto back = io::read_trajectories(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == 0);
  CHECK(back[0].seed_frame == 4);
  CHECK(back[0].state == TrajState::terminated);
  CHECK(back[0].end_reason == EndReason::arrived);
  CHECK(back[0].curve_valid);
  CHECK(std::abs(back[0].curve.a1 - 0.001) < 5e-7);
  CHECK(std::abs(back[0].curve.a2 + 1.25) < 5e-7);
  CHECK(std::abs(back[0].curve.a3 - 900.5) < 5e-7);
  REQUIRE(back[0].points.size() == 3);
  CHECK(back[0].points[2].source == PointSource::extrapolated);
  CHECK(back[0].points[2].frame == 6);
  CHECK(std::abs(back[0].points[2].pos.y - 280.125) < 5e-7);
  CHECK(back[1].state == TrajState::growing);
  CHECK(back[1].end_reason == EndReason::none);
  CHECK_FALSE(back[1].curve_valid);

  const fs::path bad = tmp_file("trajs_badstate.txt");
  write_text(bad,
             "# feedtrack trajectories v1\n"
             "0 4 1.0 2.0 detected 0.0 0.0 0.0 wandering\n");
  CHECK_THROWS_AS(io::read_trajectories(bad), io::FormatError);
}

TEST_CASE("raw predictions decode against the box decoder and honor the threshold") {
  const fs::path p = tmp_file("rawpred.txt");
  write_text(p,
             "# feedtrack rawpred v1\n"
             "0 0.0 0.0 0.0 0.0 100 200 0.9 nutriment\n"
             "0 2.0 -1.0 0.5 -0.5 50 60 0.1 nutriment\n"
             "0 0.0 0.0 3.0 1.5 30 90 0.8 ripple\n"
             "0 0.0 0.0 3.0 1.5 60 90 0.8 ripple\n");
  const io::DetectionData data = io::read_raw_predictions(p, 11.0, 21.0, 0.25);
  REQUIRE(data.detections.size() == 1);
  REQUIRE(data.detections[0].size() == 1);  // the 0.1-confidence row is dropped

  const BBox expect = decode_box(RawPrediction(0, 0, 0, 0, 100, 200, 0.9), 11.0, 21.0);
  CHECK(std::abs(data.detections[0][0].box.cx - expect.cx) < 5e-7);
  CHECK(std::abs(data.detections[0][0].box.cy - expect.cy) < 5e-7);
  CHECK(std::abs(data.detections[0][0].box.w - expect.w) < 5e-7);
  CHECK(std::abs(data.detections[0][0].box.h - expect.h) < 5e-7);

  const BBox rexpect = decode_box(RawPrediction(0, 0, 3.0, 1.5, 30, 90, 0.8), 11.0, 21.0);
  CHECK(std::abs(data.ripples[0].left.cx - rexpect.cx) < 5e-7);
  CHECK(std::abs(data.ripples[0].left.w - rexpect.w) < 5e-7);
}

TEST_CASE("report round-trips and formats") {
  EvalReport report;
  for (int nf = 3; nf <= 9; ++nf) {
    NfRow row;
    row.nf = nf;
    row.n = 30;
    row.stats = {21.32, 3.08, 0.562331, 20.169876, 22.470124};
    row.detected_fraction = 0.933333;
    row.precision_trajectory = 0.964286;
    report.rows.push_back(row);
  }
  report.detected_fraction = 0.933333;
  report.precision_trajectory = 0.964286;
  report.best_nf = 6;

  const fs::path p = tmp_file("report.txt");
  io::write_report(p, report);
  const EvalReport back = io::read_report(p);
  REQUIRE(back.rows.size() == 7);
  CHECK(back.best_nf == 6);
  CHECK(std::abs(back.rows[0].stats.mean - 21.32) < 5e-7);
  CHECK(std::abs(back.rows[0].stats.ci_low - 20.169876) < 5e-7);
  CHECK(std::abs(back.detected_fraction - 0.933333) < 5e-7);

  const std::string table = io::format_report_table(report);
  CHECK(table.find("best_nf 6") != std::string::npos);
  CHECK(table.find("21.32") != std::string::npos);

  const fs::path svg = tmp_file("report.svg");
  io::write_report_svg(svg, report);
  std::ifstream in(svg);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("<svg") != std::string::npos);
  CHECK(content.find("circle") != std::string::npos);
}
