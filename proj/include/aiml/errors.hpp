#pragma once

#include <stdexcept>
#include <string>

namespace aiml {

/// Invalid configuration: bad parameter ranges, missing keys, size mismatches.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input value outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed data: non-finite coordinates, inconsistent shapes.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (IDX streams, config files, dataset files).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: eigensolver failure, unstable extension, NaN activations.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimization divergence during encoder training.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process exit codes used by the CLI; see README for the mapping.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitParse = 3,
  kExitNumerical = 4,
  kExitTraining = 5,
  kExitIo = 6,
};

}  // namespace aiml
