#pragma once

#include <cstdint>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

// Binary threshold tree stored as a node pool; node 0 is the root.
struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0;   // go left when x[feature] <= threshold
  int left = -1, right = -1;
  TaskLabel leaf = -1;
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;
  int max_depth = 0;
  int n_classes = 0;

  TaskLabel predict(const Vector& x) const;
};

// Greedy weighted CART: splits minimize weighted Gini impurity, thresholds
// at midpoints of consecutive distinct values, ties broken by (lower
// feature index, lower threshold). Weights must sum to 1.
DecisionTreeModel train_tree(const Matrix& x,
                             const std::vector<TaskLabel>& y,
                             const Vector& weights, int max_depth,
                             int n_classes);

// Weighted Gini impurity of a class-weight histogram; exposed for tests.
double gini(const Vector& class_weights);

struct AdaBoostModel {
  std::vector<DecisionTreeModel> learners;
  std::vector<double> log_betas;  // ln((1 - eps_k) / eps_k), all > 0
  LabelSet classes;

  // Weighted-vote argmax; `weighted=false` counts each learner once.
  TaskLabel predict(const Vector& x, bool weighted = true) const;
};

struct AdaBoostParams {
  int n_estimators = 100;
  int max_depth = 6;
  std::uint64_t seed = 0;
  bool resample = false;  // literal probability-proportional resampling
};

struct BoostRound {
  double epsilon = 0;  // sum of probabilities of misclassified points
  double log_beta = 0;
  double prob_min = 0;  // after the round's renormalization
  double prob_sum = 0;
};

// eps_k = weighted error of round k; misclassified probabilities scale by
// beta_k = (1-eps)/eps, then renormalize. eps = 0 caps ln(beta) at
// ln(1e12) and stops; eps >= 0.5 discards the tree and stops.
AdaBoostModel train_adaboost(const Dataset& ds, const AdaBoostParams& params,
                             std::vector<BoostRound>* trace = nullptr);

}  // namespace eyetask
