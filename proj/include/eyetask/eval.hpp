#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

// Rows are true classes, columns predicted.
struct ConfusionMatrix {
  LabelSet classes;
  std::vector<std::vector<long>> counts;  // K x K

  long total() const;
  long trace() const;
};

enum class EvalLevel { Sample, Trial };

struct EvalReport {
  EvalLevel level = EvalLevel::Sample;
  ConfusionMatrix matrix;
  double accuracy = 0;
  long n_units = 0;
};

// Most frequent label, ties broken by class order.
TaskLabel mode_label(const std::vector<TaskLabel>& predictions);

using Predictor = std::function<TaskLabel(const Vector&)>;

// Sample level scores each row; trial level groups rows by trial id and
// scores the per-trial mode against the trial's true task.
EvalReport evaluate(const Predictor& predict, const Dataset& ds,
                    EvalLevel level);

// Aligned plain-text matrix to `path`, `true,predicted,count` CSV beside it
// (same path with .csv extension), accuracy with 3 decimals.
void render_report(const EvalReport& r, const std::string& path);

std::string format_report(const EvalReport& r);

}  // namespace eyetask
