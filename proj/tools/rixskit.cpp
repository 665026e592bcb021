// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line workbench: simulate | calibrate | extract | reconstruct | all.
// Exit codes: 0 success, 2 validation/usage, 3 I/O, 4 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rixskit/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string map_path;
  CLI::Option* map_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_map) {
  sub->add_option("--config", o.config_path,
                  "configuration file (key = value); defaults to the "
                  "built-in wsi2-default settings")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "output directory (overrides config)");
  o.seed_opt = sub->add_option("--seed", o.seed,
                               "detector RNG seed (overrides config)");
  if (with_map)
    o.map_opt = sub->add_option(
        "--map", o.map_path,
        "input map file, .csv or .json (default: <out>/map.csv)");
}

rixs::PipelineConfig load_opts(const CommonOpts& o) {
  rixs::PipelineConfig cfg = o.config_path.empty()
                                 ? rixs::PipelineConfig{}
                                 : rixs::load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.seed_opt && o.seed_opt->count() > 0) cfg.seed = o.seed;
  return cfg;
}

std::filesystem::path map_path_for(const CommonOpts& o,
                                   const rixs::PipelineConfig& cfg) {
  if (o.map_opt && o.map_opt->count() > 0) return o.map_path;
  return std::filesystem::path(cfg.output_dir) / "map.csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rixskit: synthetic RIXS map simulation and analysis"};
  app.require_subcommand(0, 1);
  bool print_default = false;
  app.add_flag("--print-default-config", print_default,
               "print the default configuration with its schema and exit");

  CommonOpts sim_o, cal_o, ext_o, rec_o, all_o;
  CLI::App* sim = app.add_subcommand(
      "simulate", "forward-simulate a RIXS map and per-row XES spectra");
  add_common(sim, sim_o, false);
  CLI::App* cal = app.add_subcommand(
      "calibrate", "render an elastic scan and fit the dispersion");
  add_common(cal, cal_o, false);
  CLI::App* ext = app.add_subcommand(
      "extract", "extract TFY/HERFD, energy-transfer map, cuts and peaks");
  add_common(ext, ext_o, true);
  CLI::App* rec = app.add_subcommand(
      "reconstruct", "reconstruct XAS from the off-resonant HEROS cut");
  add_common(rec, rec_o, true);
  CLI::App* all = app.add_subcommand("all", "run the full pipeline");
  add_common(all, all_o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_default) {
      std::cout << rixs::default_config_text();
      return 0;
    }
    if (sim->parsed()) {
      rixs::run_simulate(load_opts(sim_o));
    } else if (cal->parsed()) {
      rixs::run_calibrate(load_opts(cal_o));
    } else if (ext->parsed()) {
      auto cfg = load_opts(ext_o);
      rixs::run_extract(cfg, map_path_for(ext_o, cfg));
    } else if (rec->parsed()) {
      auto cfg = load_opts(rec_o);
      rixs::run_reconstruct(cfg, map_path_for(rec_o, cfg));
    } else if (all->parsed()) {
      rixs::run_all(load_opts(all_o));
    } else {
      std::cout << app.help();
      return 0;
    }
  } catch (const rixs::ValidationError& e) {
    std::cerr << "rixskit: configuration is invalid:\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << '\n';
    return e.exit_code();
  } catch (const rixs::Error& e) {
    std::cerr << "rixskit: error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "rixskit: unexpected error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
