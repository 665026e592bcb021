// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rixskit/detector.hpp"
#include "rixskit/errors.hpp"
#include "rixskit/io.hpp"
#include "rixskit/kh_forward.hpp"

namespace rixs {

struct GridSpec {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 2;

  EnergyGrid to_grid() const { return EnergyGrid(start, step, count); }
};

// Everything the pipeline commands need, loadable from a flat `key = value`
// text file (see default_config_text for the schema and defaults).
struct PipelineConfig {
  ModelParams model = wsi2_default();
  GridSpec incident_grid{10140.0, 1.0, 110};
  GridSpec emission_grid{8310.0, 1.0, 140};
  GridSpec transfer_grid{1690.0, 1.0, 251};
  GridSpec recon_grid{-30.0, 0.5, 141};
  double herfd_low = 8397.0;
  double herfd_high = 8398.4;
  double heros_w1 = 10172.0;
  double rebin_step = 1.0;
  std::vector<double> xes_cuts{10196.0, 10208.0, 10218.0};
  double det_c0 = 8292.6;
  double det_c1 = 0.3417;
  double det_c2 = 1.5e-6;
  double det_c3 = -5e-10;
  std::size_t det_pixels = 512;
  double exposure = 1.0;
  double flux_scale = 32000.0;
  std::uint64_t seed = 42;
  NoiseModel noise = NoiseModel::poisson;
  double scan_low = 8310.0;
  double scan_high = 8450.0;
  std::size_t scan_points = 8;
  double scan_bandwidth = 1.0;
  std::string output_dir = "out";
  unsigned workers = 0;  // 0 = one per hardware thread

  DispersionCoeffs detector() const {
    return DispersionCoeffs(det_c0, det_c1, det_c2, det_c3, 0.0,
                            double(det_pixels) - 1.0);
  }

  std::vector<double> scan_energies() const {
    std::vector<double> e(scan_points);
    for (std::size_t k = 0; k < scan_points; ++k)
      e[k] = scan_low + (scan_high - scan_low) * double(k) /
                            double(scan_points > 1 ? scan_points - 1 : 1);
    return e;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& ctx,
                               std::size_t line_no) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || s.find('-') != std::string::npos)
    throw ParseError(ctx + ": line " + std::to_string(line_no) +
                     ": not a non-negative integer: '" + s + "'");
  return v;
}

inline std::vector<double> parse_double_list(const std::string& s,
                                             const std::string& ctx,
                                             std::size_t line_no) {
  std::vector<double> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(parse_double(cur, ctx, line_no));
  }
  return out;
}

}  // namespace detail

// Applies one key to the config; returns false for unknown keys.
inline bool apply_config_key(PipelineConfig& c, const std::string& key,
                             const std::string& value, const std::string& ctx,
                             std::size_t line_no) {
  auto num = [&] { return detail::parse_double(value, ctx, line_no); };
  auto u64 = [&] { return detail::parse_u64(value, ctx, line_no); };

  if (key == "model.e_2p") c.model.e_2p = num();
  else if (key == "model.e_3d") c.model.e_3d = num();
  else if (key == "model.e_5d") c.model.e_5d = num();
  else if (key == "model.gamma_2p") c.model.gamma_2p = num();
  else if (key == "model.gamma_3d") c.model.gamma_3d = num();
  else if (key == "model.g_3d2p") c.model.g_3d2p = num();
  else if (key == "model.g_2p5d") c.model.g_2p5d = num();
  else if (key == "model.dos.shape") c.model.dos.shape = dos_shape_from_name(value);
  else if (key == "model.dos.onset") c.model.dos.onset = num();
  else if (key == "model.dos.edge_width") c.model.dos.edge_width = num();
  else if (key == "model.dos.amplitude") c.model.dos.amplitude = num();
  else if (key == "model.r0_scale") c.model.r0_scale = num();
  else if (key == "model.instrument_fwhm_in") c.model.instrument_fwhm_in = num();
  else if (key == "model.instrument_fwhm_out") c.model.instrument_fwhm_out = num();
  else if (key == "incident_grid.start") c.incident_grid.start = num();
  else if (key == "incident_grid.step") c.incident_grid.step = num();
  else if (key == "incident_grid.count") c.incident_grid.count = u64();
  else if (key == "emission_grid.start") c.emission_grid.start = num();
  else if (key == "emission_grid.step") c.emission_grid.step = num();
  else if (key == "emission_grid.count") c.emission_grid.count = u64();
  else if (key == "transfer_grid.start") c.transfer_grid.start = num();
  else if (key == "transfer_grid.step") c.transfer_grid.step = num();
  else if (key == "transfer_grid.count") c.transfer_grid.count = u64();
  else if (key == "recon_grid.start") c.recon_grid.start = num();
  else if (key == "recon_grid.step") c.recon_grid.step = num();
  else if (key == "recon_grid.count") c.recon_grid.count = u64();
  else if (key == "herfd_window.low") c.herfd_low = num();
  else if (key == "herfd_window.high") c.herfd_high = num();
  else if (key == "heros_w1") c.heros_w1 = num();
  else if (key == "rebin_step") c.rebin_step = num();
  else if (key == "xes_cuts") c.xes_cuts = detail::parse_double_list(value, ctx, line_no);
  else if (key == "detector.c0") c.det_c0 = num();
  else if (key == "detector.c1") c.det_c1 = num();
  else if (key == "detector.c2") c.det_c2 = num();
  else if (key == "detector.c3") c.det_c3 = num();
  else if (key == "detector.pixels") c.det_pixels = u64();
  else if (key == "detector.exposure") c.exposure = num();
  else if (key == "detector.flux_scale") c.flux_scale = num();
  else if (key == "detector.seed") c.seed = u64();
  else if (key == "detector.noise") c.noise = noise_model_from_name(value);
  else if (key == "scan.low") c.scan_low = num();
  else if (key == "scan.high") c.scan_high = num();
  else if (key == "scan.points") c.scan_points = u64();
  else if (key == "scan.bandwidth_fwhm") c.scan_bandwidth = num();
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "workers") c.workers = unsigned(u64());
  else return false;
  return true;
}

inline PipelineConfig parse_config_text(const std::string& text,
                                        const std::string& ctx) {
  PipelineConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> problems;
  while (std::getline(ss, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected 'key = value'");
      continue;
    }
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (!apply_config_key(cfg, key, value, ctx, line_no))
        problems.push_back("line " + std::to_string(line_no) +
                           ": unknown key '" + key + "'");
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = ctx + ":";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ParseError(msg);
  }
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

// Every violated invariant, not just the first; empty means valid.
inline std::vector<std::string> config_issues(const PipelineConfig& c) {
  std::vector<std::string> issues = c.model.issues();
  for (auto& s : issues) s = "model." + s;

  auto check_grid = [&](const GridSpec& g, const char* name) -> bool {
    if (!std::isfinite(g.start) || !std::isfinite(g.step)) {
      issues.push_back(std::string(name) + ": start/step must be finite");
      return false;
    }
    if (!(g.step > 0.0)) {
      issues.push_back(std::string(name) + ".step must be > 0");
      return false;
    }
    if (g.count < 2) {
      issues.push_back(std::string(name) + ".count must be >= 2");
      return false;
    }
    return true;
  };
  bool em_ok = check_grid(c.emission_grid, "emission_grid");
  bool inc_ok = check_grid(c.incident_grid, "incident_grid");
  check_grid(c.transfer_grid, "transfer_grid");
  check_grid(c.recon_grid, "recon_grid");

  if (!(c.herfd_low < c.herfd_high))
    issues.push_back("herfd_window: low must be < high");
  else if (em_ok) {
    EnergyGrid em = c.emission_grid.to_grid();
    if (c.herfd_high < em.start() || c.herfd_low > em.back())
      issues.push_back("herfd_window must overlap the emission grid");
  }
  if (inc_ok) {
    EnergyGrid inc = c.incident_grid.to_grid();
    if (!(c.rebin_step >= inc.step()))
      issues.push_back("rebin_step must be >= incident_grid.step");
    if (!std::isfinite(c.heros_w1) || c.heros_w1 < inc.start() ||
        c.heros_w1 > inc.back())
      issues.push_back("heros_w1 must lie inside the incident grid");
  }
  if (c.det_pixels < 8) issues.push_back("detector.pixels must be >= 8");
  try {
    auto d = c.detector();
    auto [elo, ehi] = d.energy_range();
    if (c.scan_low < elo || c.scan_high > ehi)
      issues.push_back("scan range must lie inside the detector's energy "
                       "coverage");
  } catch (const Error& e) {
    issues.push_back(std::string("detector: ") + e.what());
  }
  if (!(c.scan_low < c.scan_high))
    issues.push_back("scan.low must be < scan.high");
  if (c.scan_points < 5)
    issues.push_back("scan.points must be >= 5 for a cubic calibration");
  if (!(c.scan_bandwidth > 0.0))
    issues.push_back("scan.bandwidth_fwhm must be > 0");
  if (!(c.exposure > 0.0)) issues.push_back("detector.exposure must be > 0");
  if (!(c.flux_scale >= 0.0) || !std::isfinite(c.flux_scale))
    issues.push_back("detector.flux_scale must be finite and >= 0");
  for (double w : c.xes_cuts)
    if (!std::isfinite(w)) issues.push_back("xes_cuts entries must be finite");
  if (c.output_dir.empty()) issues.push_back("output_dir must not be empty");
  return issues;
}

inline void validate_config(const PipelineConfig& c) {
  auto issues = config_issues(c);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

// The documented schema, emitted by --print-default-config. Values render
// as shortest round-trippable decimals so a reparse is value-exact.
inline std::string config_to_text(const PipelineConfig& c) {
  using detail::fmt_shortest;
  std::string t;
  auto kv = [&](const std::string& k, const std::string& v) {
    t += k + " = " + v + "\n";
  };
  auto kvd = [&](const std::string& k, double v) { kv(k, fmt_shortest(v)); };
  auto kvu = [&](const std::string& k, std::uint64_t v) {
    kv(k, std::to_string(v));
  };
  t += "# rixskit pipeline configuration (wsi2-default)\n";
  t += "# All energies are eV; grids are {start, step, count}.\n\n";
  t += "# Kramers-Heisenberg model. The L-alpha1 offset (e_2p - e_3d =\n";
  t += "# 8397.6) and constant energy transfer (e_3d - e_5d = 1809) place\n";
  t += "# the 2p->5d resonance at e_2p - e_5d = 10206.6, 1.4 eV below the\n";
  t += "# nominal 10208 edge; that tension is kept, not reconciled.\n";
  kvd("model.e_2p", c.model.e_2p);
  kvd("model.e_3d", c.model.e_3d);
  kvd("model.e_5d", c.model.e_5d);
  kvd("model.gamma_2p", c.model.gamma_2p);
  kvd("model.gamma_3d", c.model.gamma_3d);
  kvd("model.g_3d2p", c.model.g_3d2p);
  kvd("model.g_2p5d", c.model.g_2p5d);
  kv("model.dos.shape", dos_shape_name(c.model.dos.shape));
  kvd("model.dos.onset", c.model.dos.onset);
  kvd("model.dos.edge_width", c.model.dos.edge_width);
  kvd("model.dos.amplitude", c.model.dos.amplitude);
  kvd("model.r0_scale", c.model.r0_scale);
  kvd("model.instrument_fwhm_in", c.model.instrument_fwhm_in);
  kvd("model.instrument_fwhm_out", c.model.instrument_fwhm_out);
  t += "\n# Map axes\n";
  kvd("incident_grid.start", c.incident_grid.start);
  kvd("incident_grid.step", c.incident_grid.step);
  kvu("incident_grid.count", c.incident_grid.count);
  kvd("emission_grid.start", c.emission_grid.start);
  kvd("emission_grid.step", c.emission_grid.step);
  kvu("emission_grid.count", c.emission_grid.count);
  kvd("transfer_grid.start", c.transfer_grid.start);
  kvd("transfer_grid.step", c.transfer_grid.step);
  kvu("transfer_grid.count", c.transfer_grid.count);
  t += "\n# Reconstruction axis (photoelectron energy from the 2p "
       "threshold)\n";
  kvd("recon_grid.start", c.recon_grid.start);
  kvd("recon_grid.step", c.recon_grid.step);
  kvu("recon_grid.count", c.recon_grid.count);
  t += "\n# Extraction\n";
  kvd("herfd_window.low", c.herfd_low);
  kvd("herfd_window.high", c.herfd_high);
  kvd("heros_w1", c.heros_w1);
  kvd("rebin_step", c.rebin_step);
  {
    std::string list;
    for (std::size_t i = 0; i < c.xes_cuts.size(); ++i)
      list += (i ? ", " : "") + fmt_shortest(c.xes_cuts[i]);
    kv("xes_cuts", list);
  }
  t += "\n# Dispersive detector: energy(pos) = c0 + c1 p + c2 p^2 + c3 p^3\n";
  kvd("detector.c0", c.det_c0);
  kvd("detector.c1", c.det_c1);
  kvd("detector.c2", c.det_c2);
  kvd("detector.c3", c.det_c3);
  kvu("detector.pixels", c.det_pixels);
  kvd("detector.exposure", c.exposure);
  kvd("detector.flux_scale", c.flux_scale);
  kvu("detector.seed", c.seed);
  kv("detector.noise", noise_model_name(c.noise));
  t += "\n# Elastic calibration scan\n";
  kvd("scan.low", c.scan_low);
  kvd("scan.high", c.scan_high);
  kvu("scan.points", c.scan_points);
  kvd("scan.bandwidth_fwhm", c.scan_bandwidth);
  t += "\n# Execution\n";
  kv("output_dir", c.output_dir);
  kvu("workers", c.workers);
  return t;
}

inline std::string default_config_text() {
  return config_to_text(PipelineConfig{});
}

}  // namespace rixs
