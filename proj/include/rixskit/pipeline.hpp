// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "rixskit/calibration.hpp"
#include "rixskit/config.hpp"
#include "rixskit/detector.hpp"
#include "rixskit/io.hpp"
#include "rixskit/kh_forward.hpp"
#include "rixskit/map_analysis.hpp"
#include "rixskit/peak_fit.hpp"
#include "rixskit/svg_plot.hpp"
#include "rixskit/xas_reconstruct.hpp"

namespace rixs {

// ---- logging: RIXSKIT_LOG = quiet | info (default) | debug ----

namespace detail {

inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("RIXSKIT_LOG");
    if (!v) return 1;
    std::string s(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

inline void log(int level, const std::string& msg) {
  if (log_level() >= level) std::fprintf(stderr, "rixskit: %s\n", msg.c_str());
}

inline std::string fmt_index(const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04zu", stem, k);
  return buf;
}

inline void json_dump(const nlohmann::json& j,
                      const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json coeffs_to_json(const DispersionCoeffs& d) {
  return {{"c0", d.c0()}, {"c1", d.c1()}, {"c2", d.c2()}, {"c3", d.c3()},
          {"valid_range", {d.pos_min(), d.pos_max()}}};
}

inline RixsMap read_map_any(const std::filesystem::path& path) {
  if (path.extension() == ".json") return read_map_json(path);
  return read_map_csv(path);
}

}  // namespace detail

inline void log_info(const std::string& msg) { detail::log(1, msg); }
inline void log_warn(const std::string& msg) { detail::log(0, "warning: " + msg); }
inline void log_debug(const std::string& msg) { detail::log(2, msg); }

// ---- simulate ----

inline RixsMap run_simulate(const PipelineConfig& cfg) {
  validate_config(cfg);
  const std::filesystem::path out = cfg.output_dir;
  RixsMap m = simulate_rixs_map(cfg.model, cfg.incident_grid.to_grid(),
                                cfg.emission_grid.to_grid(), cfg.workers);
  write_map_csv(m, out / "map.csv");
  write_map_json(m, out / "map.json");
  write_heatmap_svg(out / "map.svg", "synthetic RIXS map", "incident / eV",
                    "emission / eV", m, m.incident(), m.emission());

  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    std::string name = detail::fmt_index("row_", i) + ".csv";
    write_spectrum_csv(m.row_spectrum(i), out / "xes_rows" / name);
    rows.push_back({{"file", "xes_rows/" + name},
                    {"incident_eV", m.incident().point(i)}});
  }
  detail::json_dump(
      nlohmann::json{{"map_csv", "map.csv"},
                     {"map_json", "map.json"},
                     {"map_svg", "map.svg"},
                     {"shape", {m.incident().count(), m.emission().count()}},
                     {"rows", rows}},
      out / "simulate_manifest.json");
  log_info("simulate: wrote " + std::to_string(m.incident().count()) + "x" +
           std::to_string(m.emission().count()) + " map to " + out.string());
  return m;
}

// ---- calibrate ----

struct CalibrationReport {
  std::vector<double> energies;   // scan energies, eV
  std::vector<PeakFit> peaks;     // fitted elastic-line peaks, one per frame
  CalibrationResult fit;
};

inline CalibrationReport run_calibrate(const PipelineConfig& cfg) {
  validate_config(cfg);
  const std::filesystem::path out = cfg.output_dir;
  const DispersionCoeffs truth = cfg.detector();
  const std::vector<double> energies = cfg.scan_energies();

  auto frames = elastic_scan(energies, truth, cfg.scan_bandwidth, cfg.exposure,
                             cfg.flux_scale, cfg.seed, cfg.noise);

  nlohmann::json manifest = nlohmann::json::array();
  std::vector<CalibrationPoint> points;
  std::vector<PeakFit> peaks;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    std::string stem = detail::fmt_index("frame_", k);
    write_frame_csv(frames[k], out / "scan" / (stem + ".csv"));
    write_frame_meta_json(frames[k], out / "scan" / (stem + ".json"));
    manifest.push_back({{"csv", "scan/" + stem + ".csv"},
                        {"meta", "scan/" + stem + ".json"},
                        {"energy_eV", energies[k]}});
    PeakFit pf = find_peak(frames[k]);
    peaks.push_back(pf);
    points.push_back({pf.position, energies[k]});
  }
  detail::json_dump(nlohmann::json{{"frames", manifest}},
                    out / "scan" / "manifest.json");

  CalibrationResult fit = fit_dispersion(points);

  nlohmann::json jpoints = nlohmann::json::array();
  for (std::size_t k = 0; k < points.size(); ++k)
    jpoints.push_back({{"energy_eV", energies[k]},
                       {"position_px", peaks[k].position},
                       {"position_err_px", peaks[k].position_err},
                       {"residual_eV", fit.residuals[k]}});
  detail::json_dump(nlohmann::json{{"coeffs", detail::coeffs_to_json(fit.coeffs)},
                                   {"points", jpoints},
                                   {"rms_residual_eV", fit.rms_residual_eV}},
                    out / "calibration.json");

  {
    auto csv = detail::open_for_write(out / "calibration_residuals.csv");
    csv << "energy_eV,position_px,residual_eV\n";
    for (std::size_t k = 0; k < points.size(); ++k)
      csv << detail::fmt_shortest(energies[k]) << ','
          << detail::fmt_shortest(peaks[k].position) << ','
          << detail::fmt_shortest(fit.residuals[k]) << '\n';
    if (!csv)
      throw IoError("write failed: " +
                    (out / "calibration_residuals.csv").string());
    write_line_plot_svg(out / "calibration_residuals.svg",
                        "dispersion fit residuals", "energy / eV",
                        "residual / eV",
                        {{"residual", "#d62728", energies, fit.residuals}});
  }
  log_info("calibrate: rms residual " +
           std::to_string(fit.rms_residual_eV) + " eV over " +
           std::to_string(points.size()) + " points");
  return {energies, peaks, fit};
}

// ---- extract ----

struct ExtractResult {
  Spectrum tfy;
  Spectrum herfd;
  EnergyTransferMap transfer;
  PeakTracks tracks;
  WhiteLineStats tfy_stats;
  WhiteLineStats herfd_stats;
  double transfer_constant_eV;  // median over resonant-classified peaks
  double fluorescence_line_eV;  // median over fluorescence peaks; NaN if none
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void write_transfer_map_csv(const EnergyTransferMap& m,
                                   const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (std::size_t j = 0; j < m.transfer().count(); ++j)
    out << ',' << fmt_shortest(m.transfer().point(j));
  out << '\n';
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    out << fmt_shortest(m.incident().point(i));
    for (std::size_t j = 0; j < m.transfer().count(); ++j)
      out << ',' << fmt_shortest(m.at(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json white_line_json(const WhiteLineStats& w) {
  return {{"peak_energy_eV", w.peak_energy},
          {"peak_height", w.peak_height},
          {"fwhm_eV", w.fwhm},
          {"centroid_eV", w.centroid}};
}

inline std::vector<double> unit_max(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  if (!(m > 0.0)) return v;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / m;
  return out;
}

}  // namespace detail

inline ExtractResult run_extract(const PipelineConfig& cfg,
                                 const std::filesystem::path& map_path) {
  validate_config(cfg);
  const std::filesystem::path out = cfg.output_dir;
  RixsMap raw = detail::read_map_any(map_path);
  RixsMap m = rebin_incident(raw, cfg.rebin_step);

  Spectrum tfy_s = tfy(m);
  Spectrum herfd_s = herfd(m, cfg.herfd_low, cfg.herfd_high);
  write_spectrum_csv(tfy_s, out / "tfy.csv");
  write_spectrum_csv(herfd_s, out / "herfd.csv");
  write_line_plot_svg(
      out / "tfy_herfd.svg", "absorption proxies (unit-max normalized)",
      "incident / eV", "intensity",
      {{"TFY", "#1f77b4", tfy_s.grid().points(),
        detail::unit_max(tfy_s.values())},
       {"HERFD", "#d62728", herfd_s.grid().points(),
        detail::unit_max(herfd_s.values())}});

  EnergyTransferMap tmap = to_energy_transfer(m, cfg.transfer_grid.to_grid());
  detail::write_transfer_map_csv(tmap, out / "transfer_map.csv");
  detail::json_dump(nlohmann::json{{"incident", grid_to_json(tmap.incident())},
                                   {"transfer", grid_to_json(tmap.transfer())},
                                   {"intensity_csv", "transfer_map.csv"}},
                    out / "transfer_map.json");
  write_heatmap_svg(out / "transfer_map.svg", "energy-transfer map",
                    "incident / eV", "transfer / eV", tmap, tmap.incident(),
                    tmap.transfer());

  nlohmann::json jcuts = nlohmann::json::array();
  std::vector<PlotSeries> cut_series;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t k = 0; k < cfg.xes_cuts.size(); ++k) {
    Spectrum c = xes_cut(m, cfg.xes_cuts[k]);
    std::string name = detail::fmt_index("cut_", k) + ".csv";
    write_spectrum_csv(c, out / "xes_cuts" / name);
    jcuts.push_back({{"file", "xes_cuts/" + name}, {"w1_eV", cfg.xes_cuts[k]}});
    char label[48];
    std::snprintf(label, sizeof label, "w1 = %.6g eV", cfg.xes_cuts[k]);
    cut_series.push_back({label, palette[k % 6], c.grid().points(), c.values()});
  }
  if (!cut_series.empty())
    write_line_plot_svg(out / "xes_cuts.svg", "XES cuts", "emission / eV",
                        "intensity", cut_series);

  PeakTracks tracks = track_peaks(m);
  std::vector<double> transfers, fluors;
  {
    auto csv = detail::open_for_write(out / "peaks.csv");
    csv << "incident_eV,emission_eV,height,class\n";
    for (std::size_t i = 0; i < tracks.rows.size(); ++i) {
      double w1 = tracks.incident.point(i);
      for (const auto& p : tracks.rows[i]) {
        csv << detail::fmt_shortest(w1) << ',' << detail::fmt_shortest(p.emission)
            << ',' << detail::fmt_shortest(p.height) << ','
            << peak_class_name(p.cls) << '\n';
        if (p.cls == PeakClass::resonant) transfers.push_back(w1 - p.emission);
        if (p.cls == PeakClass::fluorescence) fluors.push_back(p.emission);
      }
    }
    if (!csv) throw IoError("write failed: " + (out / "peaks.csv").string());
  }
  {
    PlotSeries res{"resonant", "#1f77b4", {}, {}};
    PlotSeries flu{"fluorescence", "#d62728", {}, {}};
    PlotSeries mer{"merged", "#9467bd", {}, {}};
    for (std::size_t i = 0; i < tracks.rows.size(); ++i)
      for (const auto& p : tracks.rows[i]) {
        PlotSeries& s = p.cls == PeakClass::resonant     ? res
                        : p.cls == PeakClass::fluorescence ? flu
                                                           : mer;
        s.x.push_back(tracks.incident.point(i));
        s.y.push_back(p.emission);
      }
    write_line_plot_svg(out / "peaks.svg", "tracked emission peaks",
                        "incident / eV", "emission / eV", {res, flu, mer});
  }

  WhiteLineStats tstat = white_line_stats(tfy_s);
  WhiteLineStats hstat = white_line_stats(herfd_s);
  double transfer_const = detail::median(transfers);
  double fluor_line = detail::median(fluors);
  std::size_t n_res = transfers.size(), n_flu = fluors.size(), n_all = 0;
  for (const auto& r : tracks.rows) n_all += r.size();

  nlohmann::json summary{
      {"tfy", detail::white_line_json(tstat)},
      {"herfd", detail::white_line_json(hstat)},
      {"herfd_fwhm_reduction_percent",
       100.0 * (1.0 - hstat.fwhm / tstat.fwhm)},
      {"transfer_constant_eV", transfer_const},
      {"peak_counts",
       {{"resonant", n_res},
        {"fluorescence", n_flu},
        {"merged", n_all - n_res - n_flu}}},
      {"cuts", jcuts}};
  if (std::isfinite(fluor_line)) summary["fluorescence_line_eV"] = fluor_line;
  detail::json_dump(summary, out / "extract_summary.json");
  log_info("extract: TFY fwhm " + std::to_string(tstat.fwhm) +
           " eV, HERFD fwhm " + std::to_string(hstat.fwhm) +
           " eV, transfer constant " + std::to_string(transfer_const) + " eV");
  return {std::move(tfy_s), std::move(herfd_s), std::move(tmap),
          std::move(tracks), tstat, hstat, transfer_const, fluor_line};
}

// ---- reconstruct ----

struct ReconstructResult {
  Spectrum heros;
  XasReconstruction recon;
  WhiteLineStats white_line;
  bool near_resonance_warning;
};

inline ReconstructResult run_reconstruct(const PipelineConfig& cfg,
                                         const std::filesystem::path& map_path) {
  validate_config(cfg);
  const std::filesystem::path out = cfg.output_dir;
  RixsMap m = detail::read_map_any(map_path);

  Spectrum heros = xes_cut(m, cfg.heros_w1);
  write_spectrum_csv(heros, out / "heros_cut.csv");
  write_spectrum_plot_svg(out / "heros_cut.svg", "HEROS cut", "emission / eV",
                          heros);

  ReconstructionParams params{cfg.model.e_2p, cfg.model.e_3d,
                              cfg.model.gamma_2p, cfg.heros_w1};
  params.validate();
  bool warned = !params.off_resonant();
  if (warned)
    log_warn("heros_w1 = " + std::to_string(cfg.heros_w1) +
             " eV is within 3 lifetime widths of the resonance; "
             "reconstruction may be ill-conditioned");

  XasReconstruction recon =
      reconstruct_xas(heros, params, cfg.recon_grid.to_grid());

  // Files carry a unit-max normalized copy (flagged bins stay zero); the
  // divisor is recorded so the raw scale can be recovered.
  double vmax = 0.0;
  for (std::size_t k = 0; k < recon.xas.size(); ++k)
    if (!recon.flagged[k]) vmax = std::max(vmax, recon.xas[k]);
  double divisor = vmax > 0.0 ? vmax : 1.0;
  {
    auto csv = detail::open_for_write(out / "xas_reconstructed.csv");
    csv << "energy_eV,intensity,condition_number\n";
    for (std::size_t k = 0; k < recon.xas.size(); ++k)
      csv << detail::fmt_shortest(recon.xas.grid().point(k)) << ','
          << detail::fmt_shortest(recon.xas[k] / divisor) << ','
          << detail::fmt_shortest(recon.condition_number[k]) << '\n';
    if (!csv)
      throw IoError("write failed: " + (out / "xas_reconstructed.csv").string());
  }

  std::vector<double> plotted(recon.xas.size());
  for (std::size_t k = 0; k < recon.xas.size(); ++k)
    plotted[k] = recon.xas[k] / divisor;
  write_line_plot_svg(out / "xas_reconstructed.svg", "reconstructed XAS",
                      "photoelectron energy / eV", "intensity (unit max)",
                      {{"XAS", "#2ca02c", recon.xas.grid().points(), plotted}});

  WhiteLineStats wl =
      white_line_stats(Spectrum(recon.xas.grid(), std::move(plotted)));
  std::size_t n_flagged = 0;
  for (bool f : recon.flagged) n_flagged += f ? 1 : 0;
  detail::json_dump(
      nlohmann::json{
          {"params",
           {{"e_i", params.e_i},
            {"e_f", params.e_f},
            {"gamma_i", params.gamma_i},
            {"w1", params.w1}}},
          {"normalization",
           "intensity scaled to unit maximum; multiply by divisor to recover "
           "the raw kernel-ratio scale"},
          {"divisor", divisor},
          {"near_resonance_warning", warned},
          {"flagged_bins", n_flagged},
          {"white_line", detail::white_line_json(wl)}},
      out / "xas_reconstructed.json");
  log_info("reconstruct: white line at " + std::to_string(wl.peak_energy) +
           " eV, fwhm " + std::to_string(wl.fwhm) + " eV");
  return {std::move(heros), std::move(recon), wl, warned};
}

// ---- all ----

inline void run_all(const PipelineConfig& cfg) {
  validate_config(cfg);
  run_simulate(cfg);
  run_calibrate(cfg);
  const std::filesystem::path map = std::filesystem::path(cfg.output_dir) / "map.csv";
  run_extract(cfg, map);
  run_reconstruct(cfg, map);
}

}  // namespace rixs
