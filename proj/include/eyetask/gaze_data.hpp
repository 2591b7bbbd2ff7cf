#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eyetask/common.hpp"

namespace eyetask {

// One timestamped eye-movement reading. Missing fields are stored as NaN.
struct GazeSample {
  std::int64_t time_ms = 0;
  double lx_pix = 0, ly_pix = 0;
  double lx_href = 0, ly_href = 0;
  double lp = 0, rp = 0;

  static constexpr int kNumFields = 6;

  double field(int i) const {
    switch (i) {
      case 0: return lx_pix;
      case 1: return ly_pix;
      case 2: return lx_href;
      case 3: return ly_href;
      case 4: return lp;
      case 5: return rp;
      default: throw ConfigError("bad field index");
    }
  }

  bool valid() const {
    for (int i = 0; i < kNumFields; ++i)
      if (!std::isfinite(field(i))) return false;
    return true;
  }
};

// Names of the sample measurement fields, in field() order.
const std::vector<std::string>& sample_field_names();
int sample_field_index(const std::string& name);  // -1 if unknown

// Ordered, duplicate-free set of task names. Ordering is total and stable;
// it is the tie-break everywhere a tie can occur.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::vector<std::string> names);
  static LabelSet default_tasks();  // {Blank, Waldo, Natural, Puzzle}

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(const std::string& name) const;  // throws ConfigError if absent

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> names_;
};

using TaskLabel = int;  // index into a LabelSet

struct Trial {
  std::string user_id;
  TaskLabel task = 0;
  std::vector<GazeSample> samples;
};

// Feature matrix + labels + trial ids; the unit all learners consume.
struct Dataset {
  std::vector<std::string> feature_names;
  Matrix rows;                    // N x d
  std::vector<TaskLabel> labels;  // length N
  std::vector<int> trial_ids;     // length N, index into source trial list
  LabelSet label_set;

  Eigen::Index n() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }

  Dataset select(const std::vector<int>& idx) const;
};

struct SplitSpec {
  double test_fraction = 0.15;
  double validation_fraction = 0.15;
  std::uint64_t seed = 0;
  bool stratified = true;
  bool by_trial = false;  // stratify whole trials instead of rows
};

struct Split {
  Dataset train, validation, test;
  std::vector<int> train_idx, validation_idx, test_idx;
};

// Reads one trial CSV (header time,lx_pix,ly_pix,lx_href,ly_href,lp,rp).
// Rows with unparseable or empty measurement fields are kept with those
// fields marked missing; filtering happens in preprocess.
Trial ingest_trial(const std::string& path, const std::string& user_id,
                   TaskLabel task);

struct ManifestEntry {
  std::string path;
  std::string user_id;
  TaskLabel task;
};

// Manifest CSV: header path,user_id,task. Relative paths resolve against
// the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path,
                                         const LabelSet& labels);

// One Dataset row per valid sample; row label = owning trial's task.
// Time is never a feature.
Dataset merge_and_label(const std::vector<Trial>& trials,
                        const std::vector<std::string>& features,
                        const LabelSet& labels);

// Disjoint partition covering all rows. Stratified apportionment rounds by
// largest remainder, remainder ties resolved in label order. Identical seed
// gives an identical partition.
Split shuffle_split(const Dataset& ds, const SplitSpec& spec);

// Largest-remainder apportionment of `total` units to quotas
// fraction*count[c]; exposed for tests.
std::vector<int> largest_remainder(const std::vector<int>& counts,
                                   double fraction);

}  // namespace eyetask
