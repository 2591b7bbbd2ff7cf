#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

// Per-feature z-score parameters, population standard deviation (divisor N).
struct StandardizationParams {
  std::vector<std::string> feature_names;
  Vector mean;   // length d
  Vector stddev; // length d, all > 0
};

// Removes invalid samples and blink signatures (lp <= 0 or rp <= 0).
// Idempotent; may leave a trial empty.
std::vector<Trial> drop_invalid(const std::vector<Trial>& trials);

// Column mean and population std; rejects zero-variance features by name.
StandardizationParams fit_standardizer(const Dataset& ds);

// (x - mu) / sigma per cell; labels and trial ids untouched.
Dataset apply_standardizer(const StandardizationParams& params,
                           const Dataset& ds);

// Seeded sampling without replacement, per-class counts by largest remainder.
Dataset stratified_sample(const Dataset& ds, int target_n, std::uint64_t seed);

}  // namespace eyetask
