#pragma once

#include <stdexcept>
#include <string>

namespace qbounds {

// Base of every library error. `code()` is a stable, machine-readable tag
// that the CLI echoes into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension_mismatch", what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error("invalid_model", what) {}
};

// Raised when the Liouvillian has no unique stationary state.
class NonErgodicModel : public Error {
 public:
  explicit NonErgodicModel(const std::string& what) : Error("non_ergodic_model", what) {}
};

// Raised by the matrix logarithm on rank-deficient states.
class SingularState : public Error {
 public:
  explicit SingularState(const std::string& what) : Error("singular_state", what) {}
};

class SamplerError : public Error {
 public:
  explicit SamplerError(const std::string& what) : Error("sampler_error", what) {}
  SamplerError(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

class MonitoringError : public Error {
 public:
  explicit MonitoringError(const std::string& what) : Error("monitoring_underflow", what) {}
};

class RelativeFluctuationUndefined : public Error {
 public:
  explicit RelativeFluctuationUndefined(const std::string& what)
      : Error("relative_fluctuation_undefined", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

}  // namespace qbounds
