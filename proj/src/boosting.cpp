#include "eyetask/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eyetask {

namespace {
constexpr double kLogBetaCap = 27.631021115928547;  // ln(1e12)
}

double gini(const Vector& class_weights) {
  double total = class_weights.sum();
  if (total <= 0) return 0;
  double sq = (class_weights / total).squaredNorm();
  return 1.0 - sq;
}

TaskLabel DecisionTreeModel::predict(const Vector& x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const auto& nd = nodes[node];
    node = (x(nd.feature) <= nd.threshold) ? nd.left : nd.right;
  }
  return nodes[node].leaf;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double impurity = 0;  // weighted Gini after the split
};

TaskLabel majority_class(const Vector& class_w) {
  TaskLabel best = 0;
  for (Eigen::Index c = 1; c < class_w.size(); ++c)
    if (class_w(c) > class_w(best)) best = static_cast<TaskLabel>(c);
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<TaskLabel>& y,
              const Vector& w, int max_depth, int n_classes)
      : x_(x), y_(y), w_(w), max_depth_(max_depth), n_classes_(n_classes) {}

  int build(std::vector<int>& idx, int depth,
            std::vector<TreeNode>& nodes) {
    Vector class_w = Vector::Zero(n_classes_);
    for (int i : idx) class_w(y_[i]) += w_[i];
    const double node_gini = gini(class_w);

    auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.leaf = majority_class(class_w);
      nodes.push_back(leaf);
      return static_cast<int>(nodes.size()) - 1;
    };

    if (depth >= max_depth_ || node_gini <= 0 || idx.size() < 2)
      return make_leaf();

    SplitChoice best = find_split(idx, class_w, node_gini);
    if (!best.found) return make_leaf();

    std::vector<int> left, right;
    for (int i : idx)
      (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return make_leaf();

    const int me = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[me].feature = best.feature;
    nodes[me].threshold = best.threshold;
    int l = build(left, depth + 1, nodes);
    int r = build(right, depth + 1, nodes);
    nodes[me].left = l;
    nodes[me].right = r;
    return me;
  }

 private:
  SplitChoice find_split(const std::vector<int>& idx, const Vector& class_w,
                         double node_gini) {
    const double total_w = class_w.sum();
    SplitChoice best;
    std::vector<int> order(idx);
    Vector left_w(n_classes_);

    for (int f = 0; f < static_cast<int>(x_.cols()); ++f) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return x_(a, f) < x_(b, f);
      });
      left_w.setZero();
      double left_total = 0;
      for (size_t k = 0; k + 1 < order.size(); ++k) {
        int i = order[k];
        left_w(y_[i]) += w_[i];
        left_total += w_[i];
        double v = x_(i, f), vn = x_(order[k + 1], f);
        if (vn <= v) continue;  // only between distinct values
        double thr = 0.5 * (v + vn);
        double right_total = total_w - left_total;
        Vector right_w = class_w - left_w;
        double imp = (left_total * gini(left_w) +
                      right_total * gini(right_w)) /
                     total_w;
        // Ties resolve to lower feature, then lower threshold; scan order
        // already visits features and thresholds ascending, so strict
        // improvement is the whole rule.
        if (!best.found || imp < best.impurity - 1e-15) {
          best.found = true;
          best.feature = f;
          best.threshold = thr;
          best.impurity = imp;
        }
      }
    }
    if (best.found && best.impurity >= node_gini - 1e-15) best.found = false;
    return best;
  }

  const Matrix& x_;
  const std::vector<TaskLabel>& y_;
  const Vector& w_;
  int max_depth_;
  int n_classes_;
};

}  // namespace

DecisionTreeModel train_tree(const Matrix& x, const std::vector<TaskLabel>& y,
                             const Vector& weights, int max_depth,
                             int n_classes) {
  const auto n = x.rows();
  if (n < 1) throw DataError("train_tree needs at least one sample");
  if (weights.size() != n || static_cast<Eigen::Index>(y.size()) != n)
    throw DataError("train_tree: size mismatch");
  if (weights.minCoeff() < 0) throw DataError("negative sample weight");
  if (std::abs(weights.sum() - 1.0) > 1e-6)
    throw DataError("sample weights must sum to 1");

  DecisionTreeModel model;
  model.max_depth = max_depth;
  model.n_classes = n_classes;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  TreeBuilder builder(x, y, weights, max_depth, n_classes);
  builder.build(idx, 0, model.nodes);
  return model;
}

TaskLabel AdaBoostModel::predict(const Vector& x, bool weighted) const {
  if (learners.empty()) throw DataError("empty ensemble");
  Vector votes = Vector::Zero(classes.size());
  for (size_t k = 0; k < learners.size(); ++k)
    votes(learners[k].predict(x)) += weighted ? log_betas[k] : 1.0;
  TaskLabel best = 0;
  for (Eigen::Index c = 1; c < votes.size(); ++c)
    if (votes(c) > votes(best)) best = static_cast<TaskLabel>(c);
  return best;
}

AdaBoostModel train_adaboost(const Dataset& ds, const AdaBoostParams& params,
                             std::vector<BoostRound>* trace) {
  const auto n = ds.n();
  const int k = ds.label_set.size();
  if (params.n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
  if (k < 2) throw DataError("need at least 2 classes");

  AdaBoostModel model;
  model.classes = ds.label_set;
  Vector prob = Vector::Constant(n, 1.0 / double(n));
  Rng rng(params.seed);

  for (int round = 0; round < params.n_estimators; ++round) {
    DecisionTreeModel tree;
    if (params.resample) {
      // Literal probability-proportional resampling; the resampled multiset
      // enters the tree as counts/N weights.
      std::discrete_distribution<Eigen::Index> pick(prob.data(),
                                                    prob.data() + n);
      Vector w = Vector::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) w(pick(rng)) += 1.0 / double(n);
      tree = train_tree(ds.rows, ds.labels, w, params.max_depth, k);
    } else {
      tree = train_tree(ds.rows, ds.labels, prob, params.max_depth, k);
    }

    double eps = 0;
    std::vector<bool> wrong(n, false);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (tree.predict(ds.rows.row(i).transpose()) != ds.labels[i]) {
        wrong[i] = true;
        eps += prob(i);
      }
    }

    if (trace) trace->push_back({eps, 0, prob.minCoeff(), prob.sum()});

    if (eps >= 0.5) {
      if (round == 0)
        throw TrainError("first weak learner no better than chance (eps = " +
                         std::to_string(eps) + ")");
      break;  // discard this tree and stop
    }

    double log_beta = (eps <= 0) ? kLogBetaCap
                                 : std::log((1.0 - eps) / eps);
    if (trace) trace->back().log_beta = log_beta;
    model.learners.push_back(std::move(tree));
    model.log_betas.push_back(log_beta);

    if (eps <= 0) break;

    const double beta = (1.0 - eps) / eps;
    for (Eigen::Index i = 0; i < n; ++i)
      if (wrong[i]) prob(i) *= beta;
    prob /= prob.sum();
    if (trace) {
      trace->back().prob_min = prob.minCoeff();
      trace->back().prob_sum = prob.sum();
    }
  }

  return model;
}

}  // namespace eyetask
