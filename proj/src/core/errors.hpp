#pragma once

#include <stdexcept>
#include <string>

namespace pnfbar {

// Error categories map 1:1 onto process exit codes and C API status codes.
enum class ErrorCategory : int {
    Config = 1,    // bad configuration / invalid parameters
    Invariant = 2, // a runtime invariant of the closed loop was violated
    Numeric = 3,   // numerical failure (ARE solver, transforms)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory cat, const std::string& msg) : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

  private:
    ErrorCategory category_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::Config, msg) {}
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};

class NoStabilizingSolution : public NumericError {
  public:
    explicit NoStabilizingSolution(const std::string& msg) : NumericError(msg) {}
};

class NonConvergence : public NumericError {
  public:
    explicit NonConvergence(const std::string& msg) : NumericError(msg) {}
};

class NotSymmetric : public NumericError {
  public:
    explicit NotSymmetric(const std::string& msg) : NumericError(msg) {}
};

class Uncontrollable : public NumericError {
  public:
    explicit Uncontrollable(const std::string& msg) : NumericError(msg) {}
};

class InvariantError : public Error {
  public:
    InvariantError(const std::string& msg, double t) : Error(ErrorCategory::Invariant, msg), time_(t) {}
    double time() const { return time_; }

  private:
    double time_;
};

// Reaching phase ran into the gain singularity at t = T without switching.
class SingularityReached : public InvariantError {
  public:
    SingularityReached(const std::string& msg, double t) : InvariantError(msg, t) {}
};

// Lyapunov value left the barrier set beyond the discretization guard.
class BarrierViolated : public InvariantError {
  public:
    BarrierViolated(const std::string& msg, double t) : InvariantError(msg, t) {}
};

class DimensionMismatch : public ConfigError {
  public:
    explicit DimensionMismatch(const std::string& msg) : ConfigError(msg) {}
};

} // namespace pnfbar
