#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eyetask/gaze_data.hpp"

namespace eyetask {

// Generative parameters for one task.
struct TaskProfile {
  double gaze_dispersion = 30;   // local scatter around the current target
  double drift_rate = 0;         // smooth pursuit speed, pixels per sample
  double saccade_period = 0;     // samples between jumps; 0 = stationary
  double saccade_span = 0;       // jump extent around screen center
  bool alternate = false;        // bimodal left/right region switching
  double pupil_mean = 1000;
  double pupil_std = 50;
  double blink_rate = 0.01;      // in [0, 1)
};

struct SynthConfig {
  int n_users = 10;
  int samples_per_trial = 1000;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // scales all dispersions
  LabelSet tasks = LabelSet::default_tasks();
  std::vector<TaskProfile> task_profiles;  // one per task

  static SynthConfig defaults();
};

// One trial per (user, task); fully determined by config.seed.
std::vector<Trial> generate(const SynthConfig& config);

// Trial CSVs plus manifest.csv in `dir`, in the ingestion formats.
// Returns the manifest path.
std::string write_synth_dataset(const std::vector<Trial>& trials,
                                const LabelSet& tasks,
                                const std::string& dir);

}  // namespace eyetask
