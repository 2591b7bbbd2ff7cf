#include "eyetask/eval.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace eyetask {

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts)
    for (long c : row) t += c;
  return t;
}

long ConfusionMatrix::trace() const {
  long t = 0;
  for (size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

TaskLabel mode_label(const std::vector<TaskLabel>& predictions) {
  if (predictions.empty()) throw DataError("mode of empty prediction list");
  int k = 1 + *std::max_element(predictions.begin(), predictions.end());
  std::vector<long> counts(k, 0);
  for (TaskLabel p : predictions) counts[p]++;
  TaskLabel best = 0;
  for (int c = 1; c < k; ++c)
    if (counts[c] > counts[best]) best = c;
  return best;
}

EvalReport evaluate(const Predictor& predict, const Dataset& ds,
                    EvalLevel level) {
  if (ds.n() == 0) throw DataError("evaluate on empty dataset");
  const int k = ds.label_set.size();

  EvalReport r;
  r.level = level;
  r.matrix.classes = ds.label_set;
  r.matrix.counts.assign(k, std::vector<long>(k, 0));

  if (level == EvalLevel::Sample) {
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      TaskLabel p = predict(ds.rows.row(i).transpose());
      r.matrix.counts[ds.labels[i]][p]++;
    }
  } else {
    std::map<int, std::pair<TaskLabel, std::vector<TaskLabel>>> by_trial;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      auto& entry = by_trial[ds.trial_ids[i]];
      entry.first = ds.labels[i];
      entry.second.push_back(predict(ds.rows.row(i).transpose()));
    }
    for (const auto& [tid, entry] : by_trial)
      r.matrix.counts[entry.first][mode_label(entry.second)]++;
  }

  r.n_units = r.matrix.total();
  r.accuracy = double(r.matrix.trace()) / double(r.n_units);
  return r;
}

std::string format_report(const EvalReport& r) {
  const int k = r.matrix.classes.size();
  size_t width = 8;
  for (int c = 0; c < k; ++c)
    width = std::max(width, r.matrix.classes.name(c).size() + 2);

  std::ostringstream out;
  out << (r.level == EvalLevel::Sample ? "sample" : "trial")
      << "-level confusion matrix (rows = true, columns = predicted)\n";
  out << std::setw(static_cast<int>(width)) << "";
  for (int c = 0; c < k; ++c)
    out << std::setw(static_cast<int>(width)) << r.matrix.classes.name(c);
  out << '\n';
  for (int i = 0; i < k; ++i) {
    out << std::setw(static_cast<int>(width)) << r.matrix.classes.name(i);
    for (int j = 0; j < k; ++j)
      out << std::setw(static_cast<int>(width)) << r.matrix.counts[i][j];
    out << '\n';
  }
  out << "units: " << r.n_units << '\n';
  out << "accuracy: " << std::fixed << std::setprecision(3) << r.accuracy
      << '\n';
  return out.str();
}

void render_report(const EvalReport& r, const std::string& path) {
  std::ofstream txt(path);
  if (!txt) throw IoError("cannot write report: " + path);
  txt << format_report(r);

  std::filesystem::path csv_path(path);
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write report CSV: " + csv_path.string());
  csv << "true,predicted,count\n";
  const int k = r.matrix.classes.size();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      csv << r.matrix.classes.name(i) << ',' << r.matrix.classes.name(j)
          << ',' << r.matrix.counts[i][j] << '\n';
}

}  // namespace eyetask
