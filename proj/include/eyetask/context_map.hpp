#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

// Combined distance structure over N data points and d variables.
// Indices 0..N-1 are data points, N..N+d-1 are variables. Symmetric, zero
// diagonal, all entries in [0,1] after per-block max normalization.
struct FusedDistanceMatrix {
  Matrix dist;  // (N+d) x (N+d)
  int n_data = 0;
  int n_vars = 0;
  double block_scales[3] = {1, 1, 1};  // data-data, var-var, data-var maxima
};

enum class PointKind { Data, Variable };

struct ProjectedPoint {
  PointKind kind;
  std::string name;  // variable name, or task name for data points
};

struct Projection2D {
  Matrix coords;  // (N+d) x 2
  double stress = 0;
  int iterations = 0;
  std::vector<ProjectedPoint> points;
  std::vector<double> stress_history;  // per-iteration, non-increasing
};

// Pearson correlation; throws DataError on constant input.
double pearson(const Vector& x, const Vector& y);

// Correlation-to-distance map for the variable-variable block.
enum class CorrDistance {
  Magnitude,  // 1 - |rho|
  Signed      // (1 - rho) / 2
};

FusedDistanceMatrix build_fused_matrix(
    const Dataset& ds, CorrDistance corr = CorrDistance::Magnitude);

// SMACOF majorization from a seeded random start. Stops when the relative
// stress decrease drops below eps or at max_iter.
Projection2D smacof_embed(const FusedDistanceMatrix& m, std::uint64_t seed,
                          int max_iter = 300, double eps = 1e-6);

// Stress-1 of a configuration against target distances (normalized by the
// target sum of squares). Shared with the tests' independent minimizer.
double stress1(const Matrix& coords, const Matrix& target);

// Features ranked ascending by mean |pearson| against all other features;
// returns the k least correlated. Ties resolve by feature order.
std::vector<std::string> select_features(const Dataset& ds, int k);

// SVG scatter (green data, blue labelled variables) plus a sibling
// CSV `name,kind,x,y` next to it (same path with .csv extension).
void emit_projection(const Projection2D& p, const std::string& path);

}  // namespace eyetask
