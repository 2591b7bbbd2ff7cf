#pragma once

#include <optional>
#include <string>

#include "eyetask/boosting.hpp"
#include "eyetask/preprocess.hpp"
#include "eyetask/svm.hpp"

namespace eyetask {

// Everything needed to score raw (unstandardized) feature vectors.
struct PipelineModel {
  std::string classifier;  // "svm" or "adaboost"
  LabelSet classes;
  StandardizationParams standardizer;
  std::optional<OvrSvmModel> svm;
  std::optional<AdaBoostModel> adaboost;

  Eigen::Index dim() const {
    return static_cast<Eigen::Index>(standardizer.feature_names.size());
  }

  // Standardizes, then delegates to the stored classifier.
  TaskLabel predict(const Vector& raw) const;
};

inline constexpr const char* kModelMagic = "eyetask-model";
inline constexpr int kModelVersion = 1;

// Versioned plain text; doubles at round-trip precision, so
// load(save(m)) reproduces predictions exactly.
void save_model(const PipelineModel& m, const std::string& path);
PipelineModel load_model(const std::string& path);

}  // namespace eyetask
