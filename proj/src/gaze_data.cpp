#include "eyetask/gaze_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace eyetask {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing_marker(const std::string& raw) {
  std::string s = trimmed(raw);
  if (s.empty() || s == ".") return true;
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
  return lower == "nan";
}

// NaN (missing) if the field is a missing marker or does not parse.
double parse_measurement(const std::string& raw) {
  if (is_missing_marker(raw)) return std::nan("");
  try {
    size_t pos = 0;
    std::string s = trimmed(raw);
    double v = std::stod(s, &pos);
    if (pos != s.size()) return std::nan("");
    return v;
  } catch (const std::exception&) {
    return std::nan("");
  }
}

}  // namespace

const std::vector<std::string>& sample_field_names() {
  static const std::vector<std::string> names = {"lx_pix",  "ly_pix", "lx_href",
                                                 "ly_href", "lp",     "rp"};
  return names;
}

int sample_field_index(const std::string& name) {
  const auto& names = sample_field_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("label set must be non-empty");
  std::unordered_set<std::string> seen;
  for (const auto& n : names_)
    if (!seen.insert(n).second)
      throw ConfigError("duplicate label name: " + n);
}

LabelSet LabelSet::default_tasks() {
  return LabelSet({"Blank", "Waldo", "Natural", "Puzzle"});
}

int LabelSet::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw ConfigError("unknown task label: " + name);
}

Dataset Dataset::select(const std::vector<int>& idx) const {
  Dataset out;
  out.feature_names = feature_names;
  out.label_set = label_set;
  out.rows.resize(static_cast<Eigen::Index>(idx.size()), rows.cols());
  out.labels.reserve(idx.size());
  out.trial_ids.reserve(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    out.rows.row(static_cast<Eigen::Index>(k)) = rows.row(idx[k]);
    out.labels.push_back(labels[idx[k]]);
    out.trial_ids.push_back(trial_ids[idx[k]]);
  }
  return out;
}

Trial ingest_trial(const std::string& path, const std::string& user_id,
                   TaskLabel task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trial file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw SchemaError(path + ": empty file, expected header");

  auto header = split_csv_line(line);
  for (auto& h : header) h = trimmed(h);

  auto col_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw SchemaError(path + ": missing required column '" + name + "'");
    return static_cast<int>(it - header.begin());
  };

  const int time_col = col_of("time");
  int field_cols[GazeSample::kNumFields];
  for (int i = 0; i < GazeSample::kNumFields; ++i)
    field_cols[i] = col_of(sample_field_names()[i]);

  Trial trial;
  trial.user_id = user_id;
  trial.task = task;

  std::int64_t prev_time = -1;
  int row = 0;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    ++row;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) <= time_col)
      throw SchemaError(path + ": row " + std::to_string(row) +
                        " has too few columns");

    std::int64_t t;
    {
      std::string ts = trimmed(cells[time_col]);
      auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), t);
      if (ec != std::errc() || ptr != ts.data() + ts.size() || t < 0)
        throw SchemaError(path + ": row " + std::to_string(row) +
                          ": bad time value '" + ts + "'");
    }
    if (t < prev_time)
      throw SchemaError(path + ": row " + std::to_string(row) +
                        ": time not monotone");
    prev_time = t;

    GazeSample s;
    s.time_ms = t;
    double vals[GazeSample::kNumFields];
    for (int i = 0; i < GazeSample::kNumFields; ++i) {
      const int c = field_cols[i];
      vals[i] = (c < static_cast<int>(cells.size()))
                    ? parse_measurement(cells[c])
                    : std::nan("");
    }
    s.lx_pix = vals[0];
    s.ly_pix = vals[1];
    s.lx_href = vals[2];
    s.ly_href = vals[3];
    s.lp = vals[4];
    s.rp = vals[5];
    trial.samples.push_back(s);
  }

  if (trial.samples.empty()) throw SchemaError(path + ": empty trial");
  return trial;
}

std::vector<ManifestEntry> read_manifest(const std::string& path,
                                         const LabelSet& labels) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty manifest");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trimmed(h);
  if (header.size() < 3 || header[0] != "path" || header[1] != "user_id" ||
      header[2] != "task")
    throw SchemaError(path + ": manifest header must be path,user_id,task");

  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() < 3)
      throw SchemaError(path + ": manifest row has too few columns");
    ManifestEntry e;
    std::filesystem::path p = trimmed(cells[0]);
    e.path = p.is_absolute() ? p.string() : (base / p).string();
    e.user_id = trimmed(cells[1]);
    e.task = labels.index_of(trimmed(cells[2]));
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw SchemaError(path + ": manifest lists no trials");
  return entries;
}

Dataset merge_and_label(const std::vector<Trial>& trials,
                        const std::vector<std::string>& features,
                        const LabelSet& labels) {
  if (trials.empty()) throw DataError("no trials to merge");
  std::vector<int> feat_idx;
  for (const auto& f : features) {
    int i = sample_field_index(f);
    if (i < 0) throw ConfigError("unknown feature name: " + f);
    feat_idx.push_back(i);
  }

  Dataset ds;
  ds.feature_names = features;
  ds.label_set = labels;

  std::vector<double> flat;
  for (size_t t = 0; t < trials.size(); ++t) {
    for (const auto& s : trials[t].samples) {
      bool ok = true;
      for (int fi : feat_idx)
        if (!std::isfinite(s.field(fi))) ok = false;
      if (!ok) continue;
      for (int fi : feat_idx) flat.push_back(s.field(fi));
      ds.labels.push_back(trials[t].task);
      ds.trial_ids.push_back(static_cast<int>(t));
    }
  }

  const auto n = static_cast<Eigen::Index>(ds.labels.size());
  const auto d = static_cast<Eigen::Index>(feat_idx.size());
  if (n == 0) throw DataError("merge produced an empty dataset");
  ds.rows.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) ds.rows(i, j) = flat[i * d + j];
  return ds;
}

std::vector<int> largest_remainder(const std::vector<int>& counts,
                                   double fraction) {
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  const int target = static_cast<int>(std::llround(fraction * total));
  std::vector<int> out(counts.size());
  std::vector<std::pair<double, int>> rema;  // (remainder, class)
  int assigned = 0;
  for (size_t c = 0; c < counts.size(); ++c) {
    double quota = fraction * counts[c];
    out[c] = static_cast<int>(std::floor(quota));
    assigned += out[c];
    rema.emplace_back(quota - out[c], static_cast<int>(c));
  }
  // Remaining seats go to the largest remainders, ties in label order.
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  for (int k = 0; k < target - assigned; ++k)
    out[rema[k % rema.size()].second] += 1;
  return out;
}

namespace {

// Partition `ids` (already grouped per class) into test/val/rest.
struct Partition {
  std::vector<int> test, val, train;
};

Partition partition_groups(const std::vector<std::vector<int>>& per_class,
                           double test_f, double val_f, Rng& rng) {
  std::vector<int> counts;
  counts.reserve(per_class.size());
  for (const auto& g : per_class) counts.push_back(static_cast<int>(g.size()));
  auto test_n = largest_remainder(counts, test_f);
  auto val_n = largest_remainder(counts, val_f);

  // The two apportionments can jointly ask a tiny class for more rows than
  // it has; move the excess to classes with headroom, in label order.
  int spill_test = 0, spill_val = 0;
  for (size_t c = 0; c < counts.size(); ++c) {
    int over = test_n[c] + val_n[c] - counts[c];
    if (over <= 0) continue;
    int cut = std::min(over, val_n[c]);
    val_n[c] -= cut;
    spill_val += cut;
    over -= cut;
    test_n[c] -= over;
    spill_test += over;
  }
  for (size_t c = 0; c < counts.size() && spill_test > 0; ++c) {
    int take = std::min(counts[c] - test_n[c] - val_n[c], spill_test);
    if (take > 0) {
      test_n[c] += take;
      spill_test -= take;
    }
  }
  for (size_t c = 0; c < counts.size() && spill_val > 0; ++c) {
    int take = std::min(counts[c] - test_n[c] - val_n[c], spill_val);
    if (take > 0) {
      val_n[c] += take;
      spill_val -= take;
    }
  }

  Partition p;
  for (size_t c = 0; c < per_class.size(); ++c) {
    std::vector<int> ids = per_class[c];
    std::shuffle(ids.begin(), ids.end(), rng);
    int k = 0;
    for (int i = 0; i < test_n[c]; ++i) p.test.push_back(ids[k++]);
    for (int i = 0; i < val_n[c]; ++i) p.val.push_back(ids[k++]);
    for (; k < static_cast<int>(ids.size()); ++k) p.train.push_back(ids[k]);
  }
  return p;
}

}  // namespace

Split shuffle_split(const Dataset& ds, const SplitSpec& spec) {
  if (spec.test_fraction <= 0 || spec.test_fraction >= 1 ||
      spec.validation_fraction <= 0 || spec.validation_fraction >= 1 ||
      spec.test_fraction + spec.validation_fraction >= 1)
    throw ConfigError("split fractions must lie in (0,1) and sum below 1");

  const int n = static_cast<int>(ds.n());
  const int k = ds.label_set.size();
  Rng rng(spec.seed);

  Partition part;
  if (spec.by_trial) {
    // Stratify whole trials; rows follow their trial.
    std::vector<int> trial_task;  // trial id -> task, -1 unseen
    for (size_t i = 0; i < ds.trial_ids.size(); ++i) {
      int t = ds.trial_ids[i];
      if (t >= static_cast<int>(trial_task.size()))
        trial_task.resize(t + 1, -1);
      trial_task[t] = ds.labels[i];
    }
    std::vector<std::vector<int>> per_class(spec.stratified ? k : 1);
    for (size_t t = 0; t < trial_task.size(); ++t)
      if (trial_task[t] >= 0)
        per_class[spec.stratified ? trial_task[t] : 0].push_back(
            static_cast<int>(t));
    Partition tp = partition_groups(per_class, spec.test_fraction,
                                    spec.validation_fraction, rng);
    std::vector<int> dest(trial_task.size(), 2);  // 0 test, 1 val, 2 train
    for (int t : tp.test) dest[t] = 0;
    for (int t : tp.val) dest[t] = 1;
    for (int i = 0; i < n; ++i) {
      switch (dest[ds.trial_ids[i]]) {
        case 0: part.test.push_back(i); break;
        case 1: part.val.push_back(i); break;
        default: part.train.push_back(i); break;
      }
    }
  } else {
    std::vector<std::vector<int>> per_class(spec.stratified ? k : 1);
    if (spec.stratified && n < k)
      throw DataError("stratified split needs at least one row per class");
    for (int i = 0; i < n; ++i)
      per_class[spec.stratified ? ds.labels[i] : 0].push_back(i);
    part = partition_groups(per_class, spec.test_fraction,
                            spec.validation_fraction, rng);
  }

  std::sort(part.test.begin(), part.test.end());
  std::sort(part.val.begin(), part.val.end());
  std::sort(part.train.begin(), part.train.end());

  Split split;
  split.test_idx = part.test;
  split.validation_idx = part.val;
  split.train_idx = part.train;
  split.test = ds.select(part.test);
  split.validation = ds.select(part.val);
  split.train = ds.select(part.train);
  return split;
}

}  // namespace eyetask
