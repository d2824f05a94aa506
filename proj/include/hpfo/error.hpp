#pragma once

#include <stdexcept>
#include <string>

namespace hpfo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The projection QP for a controller step has an empty feasible set.
class QpInfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The projection QP hit its iteration cap on two consecutive controller steps.
class StalledStepError : public Error {
 public:
  using Error::Error;
};

/// Battery bounds handed to constraint assembly have lower > upper.
class InfeasibleBoxError : public Error {
 public:
  using Error::Error;
};

/// Battery state produced lower > upper power limits.
class InconsistentStateError : public Error {
 public:
  using Error::Error;
};

class NegativeSpeedError : public Error {
 public:
  using Error::Error;
};

/// Frozen-problem oracle found no feasible point.
class OracleInfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or profile text. Carries the 1-based line number (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A parsed configuration violates a named constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An error raised inside the co-simulation loop, tagged with the simulated time.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, double time_s)
      : Error("t=" + std::to_string(time_s) + " s: " + what), time_s_(time_s) {}
  double time_s() const noexcept { return time_s_; }

 private:
  double time_s_;
};

}  // namespace hpfo
