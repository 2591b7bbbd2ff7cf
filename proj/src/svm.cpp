#include "eyetask/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eyetask {

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw DataError("kernel_eval: dimension mismatch");
  if (spec.kind == KernelKind::Linear) return x.dot(y);
  return std::exp(-spec.gamma * (x - y).squaredNorm());
}

double gamma_scale(const Matrix& x) {
  const double n = double(x.rows());
  const double d = double(x.cols());
  double var_sum = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double mu = x.col(j).mean();
    var_sum += (x.col(j).array() - mu).square().sum() / n;
  }
  double mean_var = var_sum / d;
  if (mean_var <= 0) return 1.0;
  return 1.0 / (d * mean_var);
}

double BinarySvmModel::decision(const Vector& x) const {
  if (x.size() != support_vectors.cols())
    throw DataError("decision: dimension mismatch");
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
    f += alphas_signed(i) *
         kernel_eval(kernel, support_vectors.row(i).transpose(), x);
  return f;
}

namespace {

constexpr Eigen::Index kGramCacheLimit = 20000;

// Shared state of one SMO run. Gram matrix cached below kGramCacheLimit,
// kernel evaluated on the fly above.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, const Vector& y, const SmoParams& p)
      : x_(x), y_(y), p_(p), n_(x.rows()), rng_(p.seed) {
    alpha_ = Vector::Zero(n_);
    b_ = 0;
    err_ = -y_;  // f = 0 initially
    if (n_ <= kGramCacheLimit) {
      gram_.resize(n_, n_);
      for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = i; j < n_; ++j)
          gram_(i, j) = gram_(j, i) =
              kernel_eval(p_.kernel, x_.row(i).transpose(),
                          x_.row(j).transpose());
    }
  }

  void solve() {
    const int hard_cap = std::max(200, p_.max_passes * 100);
    bool examine_all = true;
    int passes = 0;
    while (passes < hard_cap) {
      int changed = 0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        if (!examine_all && !is_free(i)) continue;
        changed += examine(i);
      }
      ++passes;
      if (examine_all) {
        if (changed == 0) break;
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
  }

  const Vector& alpha() const { return alpha_; }

  // Decision value without bias for point i.
  double raw(Eigen::Index i) const {
    double f = 0;
    for (Eigen::Index j = 0; j < n_; ++j)
      if (alpha_(j) > 0) f += alpha_(j) * y_(j) * k(j, i);
    return f;
  }

  // Bias from free support vectors, else midpoint of the feasible interval
  // implied by the bound points.
  double final_bias() const {
    double sum = 0;
    int free_count = 0;
    for (Eigen::Index i = 0; i < n_; ++i)
      if (is_free(i)) {
        sum += y_(i) - raw(i);
        ++free_count;
      }
    if (free_count > 0) return sum / free_count;

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n_; ++i) {
      double g = raw(i);
      // alpha=0: y(g+b) >= 1; alpha=C: y(g+b) <= 1
      bool at_zero = alpha_(i) <= 0;
      double bound = y_(i) - g;  // b making the margin exactly 1
      if ((at_zero && y_(i) > 0) || (!at_zero && y_(i) < 0))
        lo = std::max(lo, bound);
      else
        hi = std::min(hi, bound);
    }
    if (!std::isfinite(lo)) return std::isfinite(hi) ? hi : 0.0;
    if (!std::isfinite(hi)) return lo;
    return 0.5 * (lo + hi);
  }

  // Worst KKT violation under bias b.
  double max_kkt_violation(double b) const {
    double worst = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      double m = y_(i) * (raw(i) + b);
      double v = 0;
      if (alpha_(i) <= 0)
        v = std::max(0.0, 1.0 - m);
      else if (alpha_(i) >= p_.c)
        v = std::max(0.0, m - 1.0);
      else
        v = std::abs(m - 1.0);
      worst = std::max(worst, v);
    }
    return worst;
  }

  void set_bias(double b) {
    // Re-sync error cache after an external bias change.
    for (Eigen::Index i = 0; i < n_; ++i) err_(i) += b - b_;
    b_ = b;
  }

 private:
  double k(Eigen::Index i, Eigen::Index j) const {
    if (gram_.size() > 0) return gram_(i, j);
    return kernel_eval(p_.kernel, x_.row(i).transpose(),
                       x_.row(j).transpose());
  }

  bool is_free(Eigen::Index i) const {
    return alpha_(i) > 0 && alpha_(i) < p_.c;
  }

  int examine(Eigen::Index i2) {
    const double r2 = err_(i2) * y_(i2);
    const bool violates = (r2 < -p_.tol && alpha_(i2) < p_.c) ||
                          (r2 > p_.tol && alpha_(i2) > 0);
    if (!violates) return 0;

    // Second-choice heuristic: max |E1 - E2| over free points.
    Eigen::Index best = -1;
    double best_gap = 0;
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (i == i2 || !is_free(i)) continue;
      double gap = std::abs(err_(i) - err_(i2));
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // Then all points from a random start.
    std::uniform_int_distribution<Eigen::Index> pick(0, n_ - 1);
    Eigen::Index start = pick(rng_);
    for (Eigen::Index off = 0; off < n_; ++off) {
      Eigen::Index i1 = (start + off) % n_;
      if (i1 == i2) continue;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(Eigen::Index i1, Eigen::Index i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_(i1), a2 = alpha_(i2);
    const double y1 = y_(i1), y2 = y_(i2);
    const double e1 = err_(i1), e2 = err_(i2);
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(p_.c, p_.c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - p_.c);
      hi = std::min(p_.c, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = k(i1, i1), k22 = k(i2, i2), k12 = k(i1, i2);
    const double eta = k11 + k22 - 2 * k12;
    if (eta <= 0) return false;  // flat or concave direction, skip pair

    double a2_new = a2 + y2 * (e1 - e2) / eta;
    a2_new = std::clamp(a2_new, lo, hi);
    if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;
    const double a1_new = a1 + s * (a2 - a2_new);

    // Bias update keeping KKT at the updated pair.
    const double b1 = b_ - e1 - y1 * (a1_new - a1) * k11 -
                      y2 * (a2_new - a2) * k12;
    const double b2 = b_ - e2 - y1 * (a1_new - a1) * k12 -
                      y2 * (a2_new - a2) * k22;
    double b_new;
    if (a1_new > 0 && a1_new < p_.c)
      b_new = b1;
    else if (a2_new > 0 && a2_new < p_.c)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    for (Eigen::Index i = 0; i < n_; ++i)
      err_(i) += d1 * k(i1, i) + d2 * k(i2, i) + (b_new - b_);

    alpha_(i1) = a1_new;
    alpha_(i2) = a2_new;
    b_ = b_new;
    return true;
  }

  const Matrix& x_;
  const Vector& y_;
  SmoParams p_;
  Eigen::Index n_;
  Rng rng_;
  Vector alpha_, err_;
  double b_;
  Matrix gram_;
};

}  // namespace

BinarySvmModel train_binary(const Matrix& x, const Vector& y,
                            const SmoParams& params) {
  const auto n = x.rows();
  if (n < 2) throw DataError("train_binary needs at least 2 points");
  if (!x.allFinite()) throw DataError("non-finite feature values");
  bool has_pos = false, has_neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) > 0)
      has_pos = true;
    else if (y(i) < 0)
      has_neg = true;
    else
      throw DataError("labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw DataError("training set contains a single class");
  if (params.c <= 0) throw ConfigError("C must be positive");
  if (params.kernel.kind == KernelKind::Rbf && params.kernel.gamma <= 0)
    throw ConfigError("rbf gamma must be positive");

  SmoSolver solver(x, y, params);
  double bias = 0;
  for (int round = 0; round < 5; ++round) {
    solver.solve();
    bias = solver.final_bias();
    if (solver.max_kkt_violation(bias) <= params.tol) break;
    solver.set_bias(bias);
  }

  const Vector& alpha = solver.alpha();
  double balance = 0;
  for (Eigen::Index i = 0; i < n; ++i) balance += alpha(i) * y(i);
  if (std::abs(balance) > 1e-8)
    throw TrainError("SMO left the equality constraint violated");

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < n; ++i)
    if (alpha(i) > 0) sv.push_back(i);

  BinarySvmModel model;
  model.kernel = params.kernel;
  model.c = params.c;
  model.bias = bias;
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.alphas_signed.resize(static_cast<Eigen::Index>(sv.size()));
  for (size_t i = 0; i < sv.size(); ++i) {
    model.support_vectors.row(static_cast<Eigen::Index>(i)) = x.row(sv[i]);
    model.alphas_signed(static_cast<Eigen::Index>(i)) =
        alpha(sv[i]) * y(sv[i]);
  }
  return model;
}

OvrSvmModel train_ovr(const Dataset& ds, const SmoParams& params) {
  const int k = ds.label_set.size();
  if (k < 2) throw DataError("need at least 2 classes");
  std::vector<int> counts(k, 0);
  for (int l : ds.labels) counts[l]++;
  for (int c = 0; c < k; ++c)
    if (counts[c] == 0)
      throw DataError("class has zero rows: " + ds.label_set.name(c));

  OvrSvmModel model;
  model.classes = ds.label_set;
  for (int c = 0; c < k; ++c) {
    Vector y(ds.n());
    for (Eigen::Index i = 0; i < ds.n(); ++i)
      y(i) = (ds.labels[i] == c) ? 1.0 : -1.0;
    SmoParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(c);
    model.machines.push_back(train_binary(ds.rows, y, p));
  }
  return model;
}

std::pair<TaskLabel, Vector> predict_ovr(const OvrSvmModel& m,
                                         const Vector& x) {
  Vector scores(static_cast<Eigen::Index>(m.machines.size()));
  for (size_t c = 0; c < m.machines.size(); ++c)
    scores(static_cast<Eigen::Index>(c)) = m.machines[c].decision(x);
  TaskLabel best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c)
    if (scores(c) > scores(best)) best = static_cast<TaskLabel>(c);
  return {best, scores};
}

double dual_objective(const Matrix& x, const Vector& y, const Vector& alpha,
                      const KernelSpec& kernel) {
  const auto n = x.rows();
  double obj = alpha.sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha(i) == 0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (alpha(j) == 0) continue;
      obj -= 0.5 * alpha(i) * alpha(j) * y(i) * y(j) *
             kernel_eval(kernel, x.row(i).transpose(), x.row(j).transpose());
    }
  }
  return obj;
}

}  // namespace eyetask
