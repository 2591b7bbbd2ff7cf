#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eyetask {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error hierarchy; the CLI maps these onto exit codes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All randomized operations draw from this generator, seeded explicitly.
// Algorithm identifier recorded in run metadata: "mt19937_64".
using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm = "mt19937_64";

}  // namespace eyetask
