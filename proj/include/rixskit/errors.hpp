// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rixs {

// Error taxonomy. Exit codes are a stable CLI contract:
//   2 = validation / bad input, 3 = I/O, 4 = numerical failure.
enum class ErrorKind {
  invalid_parameter,
  out_of_range,
  empty_window,
  underdetermined,
  parse,
  validation,
  io,
  no_signal,
  ambiguous_peak,
  calibration_failed,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::io:
        return 3;
      case ErrorKind::no_signal:
      case ErrorKind::ambiguous_peak:
      case ErrorKind::calibration_failed:
        return 4;
      default:
        return 2;
    }
  }

private:
  ErrorKind kind_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& msg)
      : Error(ErrorKind::invalid_parameter, msg) {}
};

struct OutOfRange : Error {
  explicit OutOfRange(const std::string& msg)
      : Error(ErrorKind::out_of_range, msg) {}
};

struct EmptyWindow : Error {
  explicit EmptyWindow(const std::string& msg)
      : Error(ErrorKind::empty_window, msg) {}
};

struct Underdetermined : Error {
  explicit Underdetermined(const std::string& msg)
      : Error(ErrorKind::underdetermined, msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg)
      : Error(ErrorKind::parse, msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

struct NoSignal : Error {
  explicit NoSignal(const std::string& msg)
      : Error(ErrorKind::no_signal, msg) {}
};

struct AmbiguousPeak : Error {
  explicit AmbiguousPeak(const std::string& msg)
      : Error(ErrorKind::ambiguous_peak, msg) {}
};

struct CalibrationFailed : Error {
  explicit CalibrationFailed(const std::string& msg)
      : Error(ErrorKind::calibration_failed, msg) {}
};

// Collects every violated invariant of a config before anything is written.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(ErrorKind::validation, join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "config validation failed:";
    for (const auto& s : issues) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace rixs
