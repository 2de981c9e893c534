#pragma once

#include <stdexcept>
#include <string>

namespace swatom {

/// Base for every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible domain.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// The momentum grid cannot represent the requested state or transform.
class GridError : public Error {
public:
  using Error::Error;
};

/// A conserved quantity or truncation guard was violated during a run.
class IntegrityError : public Error {
public:
  IntegrityError(std::string invariant, double tau, const std::string& detail)
      : Error(invariant + " violated at tau=" + std::to_string(tau) + ": " + detail),
        invariant_(std::move(invariant)),
        tau_(tau) {}
  IntegrityError(std::string invariant, const std::string& detail)
      : Error(invariant + " violated: " + detail), invariant_(std::move(invariant)), tau_(-1.0) {}

  const std::string& invariant() const noexcept { return invariant_; }
  /// Time at which the violation tripped, or -1 when not tied to a run time.
  double tau() const noexcept { return tau_; }

private:
  std::string invariant_;
  double tau_;
};

/// Configuration could not be parsed or resolved.
class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace swatom
