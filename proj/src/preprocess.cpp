#include "eyetask/preprocess.hpp"

#include <algorithm>
#include <numeric>

namespace eyetask {

std::vector<Trial> drop_invalid(const std::vector<Trial>& trials) {
  std::vector<Trial> out;
  out.reserve(trials.size());
  for (const auto& t : trials) {
    Trial kept;
    kept.user_id = t.user_id;
    kept.task = t.task;
    for (const auto& s : t.samples)
      if (s.valid() && s.lp > 0 && s.rp > 0) kept.samples.push_back(s);
    out.push_back(std::move(kept));
  }
  return out;
}

StandardizationParams fit_standardizer(const Dataset& ds) {
  const auto n = ds.n();
  if (n < 2) throw DataError("standardizer needs at least 2 rows");
  StandardizationParams p;
  p.feature_names = ds.feature_names;
  p.mean = ds.rows.colwise().mean();
  p.stddev.resize(ds.dim());
  for (Eigen::Index j = 0; j < ds.dim(); ++j) {
    double var =
        (ds.rows.col(j).array() - p.mean(j)).square().sum() / double(n);
    double sd = std::sqrt(var);
    if (sd <= 0.0)
      throw DataError("degenerate feature (zero variance): " +
                      ds.feature_names[j]);
    p.stddev(j) = sd;
  }
  return p;
}

Dataset apply_standardizer(const StandardizationParams& params,
                           const Dataset& ds) {
  if (params.feature_names != ds.feature_names)
    throw ConfigError("standardizer feature names do not match dataset");
  Dataset out = ds;
  out.rows = (ds.rows.rowwise() - params.mean.transpose()).array().rowwise() /
             params.stddev.transpose().array();
  return out;
}

Dataset stratified_sample(const Dataset& ds, int target_n,
                          std::uint64_t seed) {
  const int n = static_cast<int>(ds.n());
  if (target_n <= 0) throw ConfigError("target_n must be positive");
  if (target_n > n) throw DataError("target_n exceeds dataset size");

  const int k = ds.label_set.size();
  std::vector<std::vector<int>> per_class(k);
  for (int i = 0; i < n; ++i) per_class[ds.labels[i]].push_back(i);
  std::vector<int> counts;
  for (const auto& g : per_class) counts.push_back(static_cast<int>(g.size()));

  auto take = largest_remainder(counts, double(target_n) / double(n));
  // Apportionment can overshoot a class's population; clamp and push the
  // spill to classes with headroom, in label order.
  int spill = 0;
  for (int c = 0; c < k; ++c)
    if (take[c] > counts[c]) {
      spill += take[c] - counts[c];
      take[c] = counts[c];
    }
  for (int c = 0; c < k && spill > 0; ++c) {
    int room = counts[c] - take[c];
    int add = std::min(room, spill);
    take[c] += add;
    spill -= add;
  }

  Rng rng(seed);
  std::vector<int> chosen;
  for (int c = 0; c < k; ++c) {
    auto ids = per_class[c];
    std::shuffle(ids.begin(), ids.end(), rng);
    chosen.insert(chosen.end(), ids.begin(), ids.begin() + take[c]);
  }
  std::sort(chosen.begin(), chosen.end());
  return ds.select(chosen);
}

}  // namespace eyetask
