// Exception types shared by all gasnet modules.

#ifndef GASNET_ERROR_HPP
#define GASNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gasnet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario text. Carries the 1-based line of the offending token.
class ParseError : public Error {
public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Semantically invalid configuration. `field()` names the offending key
/// using dotted notation, e.g. `gas.v` or `pipeline[2].dL`.
class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Initial steady state does not exist (pressure would vanish) or the
/// topology is unsupported by the steady solver.
class SteadyStateError : public Error {
public:
  using Error::Error;
};

/// Linear solve failed: singular matrix or numerically rank deficient.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double condition_estimate)
      : Error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

private:
  double condition_;
};

/// Simulation produced non-finite or runaway values, or reverse flow.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, long step = -1)
      : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

private:
  long step_;
};

/// Two probe series cannot be aligned on common instants.
class AlignmentError : public Error {
public:
  using Error::Error;
};

}  // namespace gasnet

#endif  // GASNET_ERROR_HPP
