#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef FEEDTRACK_CLI_PATH
#error "FEEDTRACK_CLI_PATH must be defined by the build"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "feedtrack_cli_test";

int run(const std::string& args) {
  const std::string cmd =
      std::string(FEEDTRACK_CLI_PATH) + " " + args + " > /dev/null 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string path(const std::string& name) { return (kWorkDir / name).string(); }

struct WorkDirSetup {
  WorkDirSetup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
  }
} setup;

}  // namespace

TEST_CASE("simulate, track, eval pipeline runs end to end") {
  CHECK(run("simulate --detections " + path("det.txt") + " --ground-truth " + path("gt.txt") +
            " --seed 5 --n-pellets 10") == 0);
  CHECK(fs::exists(path("det.txt")));
  CHECK(fs::exists(path("gt.txt")));

  CHECK(run("track --detections " + path("det.txt") + " --out " + path("traj.txt")) == 0);
  CHECK(fs::exists(path("traj.txt")));

  CHECK(run("eval --trajectories " + path("traj.txt") + " --ground-truth " + path("gt.txt") +
            " --out " + path("report.txt")) == 0);
  const std::string report = slurp(path("report.txt"));
  CHECK(report.find("# feedtrack report v1") == 0);
  CHECK(report.find("summary") != std::string::npos);
}

TEST_CASE("sweep emits one row per commit count") {
  CHECK(run("simulate --detections " + path("sw_det.txt") + " --ground-truth " +
            path("sw_gt.txt") + " --seed 6 --n-pellets 8") == 0);
  CHECK(run("sweep --detections " + path("sw_det.txt") + " --ground-truth " + path("sw_gt.txt") +
            " --out " + path("sw_report.txt") + " --svg " + path("sw_report.svg")) == 0);
  const std::string report = slurp(path("sw_report.txt"));
  int rows = 0;
  for (size_t pos = 0; (pos = report.find("row ", pos)) != std::string::npos; pos += 4) ++rows;
  CHECK(rows == 7);
  for (int nf = 3; nf <= 9; ++nf) {
    CHECK(report.find("row " + std::to_string(nf) + " ") != std::string::npos);
  }
  CHECK(slurp(path("sw_report.svg")).find("<svg") != std::string::npos);
}

TEST_CASE("invalid configuration exits with code 1") {
  CHECK(run("simulate --detections " + path("bad_det.txt") + " --ground-truth " +
            path("bad_gt.txt") + " --n-frames 0") == 1);
  CHECK(run("track --out " + path("none.txt")) == 1);  // neither input given
}

TEST_CASE("missing input exits with code 2 and writes nothing") {
  const std::string out = path("should_not_exist.txt");
  CHECK(run("track --detections " + path("no_such_file.txt") + " --out " + out) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("eval --trajectories " + path("no_such_file.txt") + " --ground-truth " +
            path("no_such_file.txt")) == 2);
}

TEST_CASE("malformed input exits with code 2") {
  std::ofstream(path("garbage.txt")) << "# feedtrack detections v1\nnot a row\n";
  CHECK(run("track --detections " + path("garbage.txt") + " --out " + path("g_out.txt")) == 2);
}

TEST_CASE("same seed gives byte-identical outputs") {
  for (const char* tag : {"a", "b"}) {
    CHECK(run("simulate --detections " + path(std::string("rep_det_") + tag) +
              " --ground-truth " + path(std::string("rep_gt_") + tag) +
              " --seed 7 --n-pellets 12 --noise-sigma 1.0 --clutter-rate 2.0") == 0);
    CHECK(run("track --detections " + path(std::string("rep_det_") + tag) + " --out " +
              path(std::string("rep_traj_") + tag)) == 0);
  }
  CHECK(slurp(path("rep_det_a")) == slurp(path("rep_det_b")));
  CHECK(slurp(path("rep_gt_a")) == slurp(path("rep_gt_b")));
  CHECK(slurp(path("rep_traj_a")) == slurp(path("rep_traj_b")));
}

TEST_CASE("raw predictions are accepted as tracker input") {
  std::ofstream raw(path("raw.txt"));
  raw << "# feedtrack rawpred v1\n";
  // one high-confidence nutriment and a ripple pair on frame 0
  raw << "0 0.0 0.0 0.0 0.0 1800 300 0.9 nutriment\n";
  raw << "0 0.0 0.0 3.3 1.6 345 950 0.9 ripple\n";
  raw << "0 0.0 0.0 3.3 1.6 748 950 0.9 ripple\n";
  raw.close();
  CHECK(run("track --raw-predictions " + path("raw.txt") + " --out " + path("raw_traj.txt")) == 0);
  CHECK(fs::exists(path("raw_traj.txt")));
}

TEST_CASE("stabilized tracking consumes a transform file") {
  CHECK(run("simulate --detections " + path("sh_det.txt") + " --ground-truth " +
            path("sh_gt.txt") + " --transforms " + path("sh_tr.txt") +
            " --seed 9 --n-pellets 5 --shake-amplitude 10") == 0);
  CHECK(fs::exists(path("sh_tr.txt")));
  CHECK(run("track --detections " + path("sh_det.txt") + " --transforms " + path("sh_tr.txt") +
            " --out " + path("sh_traj.txt")) == 0);
  CHECK(fs::exists(path("sh_traj.txt")));
}
