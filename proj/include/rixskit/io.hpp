// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"

namespace rixs {

namespace detail {

// Shortest round-trippable decimal representation; keeps rerun output
// byte-identical.
inline std::string fmt_shortest(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline double parse_double(const std::string& s, const std::string& context,
                           std::size_t line_no) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError(context + ": line " + std::to_string(line_no) +
                     ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

// Infers a uniform grid from explicit axis values, rejecting non-uniform
// spacing.
inline EnergyGrid grid_from_points(const std::vector<double>& e,
                                   const std::string& context) {
  if (e.size() < 2)
    throw ParseError(context + ": need at least 2 axis points");
  double step = (e.back() - e.front()) / double(e.size() - 1);
  if (!(step > 0.0)) throw ParseError(context + ": axis must be ascending");
  for (std::size_t i = 0; i < e.size(); ++i)
    if (std::abs(e[i] - (e.front() + double(i) * step)) > 1e-6 * step)
      throw ParseError(context + ": axis is not uniform at index " +
                       std::to_string(i));
  return EnergyGrid(e.front(), step, e.size());
}

}  // namespace detail

// ---- Spectrum CSV: header `energy_eV,intensity`, ascending energies ----

inline void write_spectrum_csv(const Spectrum& s,
                               const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "energy_eV,intensity\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << detail::fmt_shortest(s.grid().point(i)) << ','
        << detail::fmt_shortest(s[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> energies, values;
  const std::string ctx = path.string();
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;  // header
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() < 2)
      throw ParseError(ctx + ": line " + std::to_string(line_no) +
                       ": expected 2 columns");
    energies.push_back(detail::parse_double(cells[0], ctx, line_no));
    values.push_back(detail::parse_double(cells[1], ctx, line_no));
  }
  if (energies.empty()) throw ParseError(ctx + ": no data rows");
  return Spectrum(detail::grid_from_points(energies, ctx), std::move(values));
}

// ---- RixsMap CSV: first row = emission axis, first column = incident axis,
//      cell (0,0) blank ----

inline void write_map_csv(const RixsMap& m, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  for (std::size_t j = 0; j < m.emission().count(); ++j)
    out << ',' << detail::fmt_shortest(m.emission().point(j));
  out << '\n';
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    out << detail::fmt_shortest(m.incident().point(i));
    for (std::size_t j = 0; j < m.emission().count(); ++j)
      out << ',' << detail::fmt_shortest(m.at(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline RixsMap read_map_csv(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  const std::string ctx = path.string();
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError(ctx + ": line 1: missing emission axis header");
  auto header = detail::split_csv_line(line);
  if (header.size() < 3 || !header[0].empty())
    throw ParseError(ctx + ": line 1: expected blank cell then emission axis");
  std::vector<double> emission;
  for (std::size_t j = 1; j < header.size(); ++j)
    emission.push_back(detail::parse_double(header[j], ctx, 1));

  std::vector<double> incident;
  std::vector<double> intensity;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError(ctx + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " columns, got " +
                       std::to_string(cells.size()));
    incident.push_back(detail::parse_double(cells[0], ctx, line_no));
    for (std::size_t j = 1; j < cells.size(); ++j)
      intensity.push_back(detail::parse_double(cells[j], ctx, line_no));
  }
  if (incident.size() < 2) throw ParseError(ctx + ": fewer than 2 map rows");
  return RixsMap(detail::grid_from_points(incident, ctx),
                 detail::grid_from_points(emission, ctx), std::move(intensity));
}

// ---- RixsMap JSON container ----

inline nlohmann::json grid_to_json(const EnergyGrid& g) {
  return {{"start", g.start()}, {"step", g.step()}, {"count", g.count()}};
}

inline EnergyGrid grid_from_json(const nlohmann::json& j,
                                 const std::string& context) {
  if (!j.contains("start") || !j.contains("step") || !j.contains("count"))
    throw ParseError(context + ": grid needs start/step/count");
  return EnergyGrid(j.at("start").get<double>(), j.at("step").get<double>(),
                    j.at("count").get<std::size_t>());
}

inline void write_map_json(const RixsMap& m, const std::filesystem::path& path) {
  nlohmann::json j;
  j["incident"] = grid_to_json(m.incident());
  j["emission"] = grid_to_json(m.emission());
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.incident().count(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["intensity"] = std::move(rows);
  auto out = detail::open_for_write(path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline RixsMap read_map_json(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  const std::string ctx = path.string();
  EnergyGrid incident = grid_from_json(j.at("incident"), ctx);
  EnergyGrid emission = grid_from_json(j.at("emission"), ctx);
  std::vector<double> intensity;
  intensity.reserve(incident.count() * emission.count());
  for (const auto& row : j.at("intensity"))
    for (const auto& v : row) intensity.push_back(v.get<double>());
  return RixsMap(incident, emission, std::move(intensity));
}

}  // namespace rixs
