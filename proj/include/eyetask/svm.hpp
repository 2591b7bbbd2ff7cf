#pragma once

#include <cstdint>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;  // rbf only, > 0
};

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

// The "scale" heuristic: 1 / (d * mean per-column variance).
double gamma_scale(const Matrix& x);

struct BinarySvmModel {
  Matrix support_vectors;  // M x d
  Vector alphas_signed;    // alpha_i * y_i, |value| in (0, C]
  double bias = 0;
  KernelSpec kernel;
  double c = 1.0;

  double decision(const Vector& x) const;
};

struct OvrSvmModel {
  LabelSet classes;
  std::vector<BinarySvmModel> machines;  // one per class, class order

  Eigen::Index dim() const { return machines.at(0).support_vectors.cols(); }
};

struct SmoParams {
  double c = 1000.0;
  KernelSpec kernel;
  double tol = 1e-3;
  int max_passes = 10;
  std::uint64_t seed = 0;
};

// Soft-margin dual via SMO. On return: 0 <= alpha_i <= C,
// |sum alpha_i y_i| <= 1e-8, KKT residuals within tol for every training
// point; bias averaged over free support vectors, else midpoint of the
// bound-derived feasible interval.
BinarySvmModel train_binary(const Matrix& x, const Vector& y,
                            const SmoParams& params);

// One binary machine per class, i-th class positive vs rest.
OvrSvmModel train_ovr(const Dataset& ds, const SmoParams& params);

// Argmax of per-class decision values; ties break by class order.
std::pair<TaskLabel, Vector> predict_ovr(const OvrSvmModel& m,
                                         const Vector& x);

// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij for a
// trained model evaluated against its own support set.
double dual_objective(const Matrix& x, const Vector& y, const Vector& alpha,
                      const KernelSpec& kernel);

}  // namespace eyetask
