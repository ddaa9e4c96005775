#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace streambeam {

// Invalid decode or experiment configuration. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed file: corpus, model, config, results. CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model file rejected at load (shape, normalization, missing rows).
class ModelError : public IoError {
 public:
  using IoError::IoError;
};

// Input data the model cannot consume, e.g. an out-of-vocabulary token.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant. Programming error, not a recoverable state.
// CLI exit code 3.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void expects(bool condition, const char* what) {
  if (!condition) throw ContractViolation(what);
}

// Maps an exception escaping the experiment runner to the CLI exit code.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace streambeam
