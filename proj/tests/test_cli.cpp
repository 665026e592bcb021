// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests that drive the installed binary through a shell, checking
// the documented exit codes and the byte-stability of every artifact.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rixskit/config.hpp"
#include "rixskit/io.hpp"

using namespace rixs;
namespace fs = std::filesystem;

namespace {

const std::string kBin = RIXSKIT_BIN;

int run(const std::string& args) {
  int st = std::system((kBin + " " + args).c_str());
  if (WIFEXITED(st)) return WEXITSTATUS(st);
  return -1;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rixskit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Small grids keep the end-to-end runs fast while exercising every stage.
std::string small_config() {
  return
      "incident_grid.start = 10190\n"
      "incident_grid.step = 2\n"
      "incident_grid.count = 19\n"   // 10190..10226
      "emission_grid.start = 8350\n"
      "emission_grid.step = 2\n"
      "emission_grid.count = 50\n"   // 8350..8448
      "transfer_grid.start = 1780\n"
      "transfer_grid.step = 2\n"
      "transfer_grid.count = 40\n"
      "recon_grid.start = -30\n"
      "recon_grid.step = 1\n"
      "recon_grid.count = 61\n"
      "rebin_step = 2\n"
      "heros_w1 = 10196\n"
      "herfd_window.low = 8396\n"
      "herfd_window.high = 8400\n"
      "xes_cuts = 10196, 10208, 10218\n"
      "scan.points = 6\n"
      "workers = 1\n";
}

}  // namespace

TEST_CASE("the default config prints and parses back") {
  auto dir = fresh_dir("defaults");
  auto out = dir / "default.cfg";
  REQUIRE(run("--print-default-config > " + out.string()) == 0);
  PipelineConfig c = load_config(out);
  CHECK(config_to_text(c) == default_config_text());
  fs::remove_all(dir);
}

TEST_CASE("running without a subcommand shows help and succeeds") {
  auto dir = fresh_dir("help");
  CHECK(run("> " + (dir / "help.txt").string()) == 0);
  CHECK(slurp(dir / "help.txt").find("simulate") != std::string::npos);
  CHECK(run("--help > /dev/null") == 0);
  fs::remove_all(dir);
}

TEST_CASE("unknown flags exit with the validation code") {
  CHECK(run("--definitely-not-a-flag 2> /dev/null") == 2);
  CHECK(run("simulate --bogus 2> /dev/null") == 2);
}

TEST_CASE("simulate writes a map of the configured shape, byte-stable") {
  auto dir = fresh_dir("simulate");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());

  auto out1 = dir / "run1";
  auto out2 = dir / "run2";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " +
              out1.string() + " 2> /dev/null") == 0);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " +
              out2.string() + " 2> /dev/null") == 0);

  RixsMap m = read_map_csv(out1 / "map.csv");
  CHECK(m.incident().count() == 19);
  CHECK(m.emission().count() == 50);
  CHECK(m.incident().start() == 10190.0);

  for (const char* name : {"map.csv", "map.json", "map.svg",
                           "simulate_manifest.json"})
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  CHECK(slurp(out1 / "xes_rows" / "row_0000.csv") ==
        slurp(out2 / "xes_rows" / "row_0000.csv"));
  fs::remove_all(dir);
}

TEST_CASE("an invalid config exits 2 and names the bad field") {
  auto dir = fresh_dir("invalid");
  auto cfg = dir / "bad.cfg";
  spit(cfg, "emission_grid.step = -1\n");
  auto err = dir / "stderr.txt";
  CHECK(run("simulate --config " + cfg.string() + " --out " +
            (dir / "out").string() + " 2> " + err.string()) == 2);
  std::string msg = slurp(err);
  CHECK(msg.find("emission_grid.step") != std::string::npos);
  // Validation must fail before anything lands on disk.
  CHECK_FALSE(fs::exists(dir / "out" / "map.csv"));
  fs::remove_all(dir);
}

TEST_CASE("a malformed config is a parse failure naming the line") {
  auto dir = fresh_dir("malformed");
  auto cfg = dir / "bad.cfg";
  spit(cfg, "model.e_2p = ten thousand\n");
  auto err = dir / "stderr.txt";
  CHECK(run("simulate --config " + cfg.string() + " 2> " + err.string()) ==
        2);
  CHECK(slurp(err).find("line 1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("extract rejects empty and missing map files") {
  auto dir = fresh_dir("extract_err");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());
  auto empty = dir / "empty.csv";
  spit(empty, "");
  CHECK(run("extract --config " + cfg.string() + " --map " + empty.string() +
            " --out " + (dir / "o1").string() + " 2> /dev/null") == 2);
  CHECK(run("extract --config " + cfg.string() + " --map " +
            (dir / "missing.csv").string() + " --out " +
            (dir / "o2").string() + " 2> /dev/null") == 3);
  fs::remove_all(dir);
}

TEST_CASE("extract produces yields, cuts, tracks and a summary") {
  auto dir = fresh_dir("extract");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());
  auto out = dir / "out";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string() +
              " 2> /dev/null") == 0);
  REQUIRE(run("extract --config " + cfg.string() + " --out " + out.string() +
              " 2> /dev/null") == 0);

  for (const char* name :
       {"tfy.csv", "herfd.csv", "transfer_map.csv", "peaks.csv",
        "extract_summary.json", "tfy_herfd.svg"})
    CHECK(fs::exists(out / name));

  auto j = nlohmann::json::parse(slurp(out / "extract_summary.json"));
  CHECK(j.contains("tfy"));
  CHECK(j.contains("herfd"));
  CHECK(j.contains("transfer_constant_eV"));
  double tc = j["transfer_constant_eV"].get<double>();
  CHECK(std::abs(tc - 1809.0) <= 2.0 + 1e-9);  // within one incident step

  // Rerunning the analysis is byte-identical.
  auto out2 = dir / "out2";
  fs::create_directories(out2);
  fs::copy_file(out / "map.csv", out2 / "map.csv");
  REQUIRE(run("extract --config " + cfg.string() + " --map " +
              (out / "map.csv").string() + " --out " + out2.string() +
              " 2> /dev/null") == 0);
  CHECK(slurp(out / "extract_summary.json") ==
        slurp(out2 / "extract_summary.json"));
  CHECK(slurp(out / "tfy.csv") == slurp(out2 / "tfy.csv"));
  fs::remove_all(dir);
}

TEST_CASE("reconstruct emits the sharpened profile with its sidecar") {
  auto dir = fresh_dir("reconstruct");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());
  auto out = dir / "out";
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string() +
              " 2> /dev/null") == 0);
  REQUIRE(run("reconstruct --config " + cfg.string() + " --out " +
              out.string() + " 2> /dev/null") == 0);

  CHECK(fs::exists(out / "heros_cut.csv"));
  CHECK(fs::exists(out / "xas_reconstructed.csv"));
  auto j = nlohmann::json::parse(slurp(out / "xas_reconstructed.json"));
  CHECK(j.contains("white_line"));
  CHECK(j.contains("normalization"));
  CHECK(j["params"]["w1"].get<double>() == 10196.0);

  // w1 this close to the edge must warn on stderr but still succeed.
  auto err = dir / "warn.txt";
  REQUIRE(run("reconstruct --config " + cfg.string() + " --out " +
              out.string() + " 2> " + err.string()) == 0);
  CHECK(j["near_resonance_warning"].get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("calibrate writes a report and honors the seed flag") {
  auto dir = fresh_dir("calibrate");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());
  auto o1 = dir / "s1";
  auto o2 = dir / "s2";
  auto o3 = dir / "s3";
  REQUIRE(run("calibrate --config " + cfg.string() + " --out " + o1.string() +
              " --seed 1 2> /dev/null") == 0);
  REQUIRE(run("calibrate --config " + cfg.string() + " --out " + o2.string() +
              " --seed 1 2> /dev/null") == 0);
  REQUIRE(run("calibrate --config " + cfg.string() + " --out " + o3.string() +
              " --seed 2 2> /dev/null") == 0);

  auto j = nlohmann::json::parse(slurp(o1 / "calibration.json"));
  CHECK(j["points"].size() == 6);
  CHECK(j["rms_residual_eV"].get<double>() < 0.1);
  CHECK(j["coeffs"].contains("c3"));

  CHECK(slurp(o1 / "calibration.json") == slurp(o2 / "calibration.json"));
  CHECK(slurp(o1 / "scan" / "frame_0000.csv") ==
        slurp(o2 / "scan" / "frame_0000.csv"));
  CHECK(slurp(o1 / "scan" / "frame_0000.csv") !=
        slurp(o3 / "scan" / "frame_0000.csv"));
  fs::remove_all(dir);
}

TEST_CASE("the all-in-one subcommand chains every stage") {
  auto dir = fresh_dir("all");
  auto cfg = dir / "small.cfg";
  spit(cfg, small_config());
  auto out = dir / "out";
  REQUIRE(run("all --config " + cfg.string() + " --out " + out.string() +
              " 2> /dev/null") == 0);
  for (const char* name : {"map.csv", "calibration.json",
                           "extract_summary.json", "xas_reconstructed.csv"})
    CHECK(fs::exists(out / name));
  fs::remove_all(dir);
}
