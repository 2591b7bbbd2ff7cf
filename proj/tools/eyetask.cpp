// Command-line front end: synth, explore, train, predict, evaluate.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eyetask/context_map.hpp"
#include "eyetask/eval.hpp"
#include "eyetask/gaze_data.hpp"
#include "eyetask/model_io.hpp"
#include "eyetask/preprocess.hpp"
#include "eyetask/synth.hpp"

namespace {

using namespace eyetask;

const std::vector<std::string> kDefaultFeatures = {"lx_pix", "ly_pix",
                                                   "lx_href", "ly_href", "lp"};

struct CommonOpts {
  std::uint64_t seed = 0;
  std::vector<std::string> features = kDefaultFeatures;
  double test_fraction = 0.15;
  double validation_fraction = 0.15;
  bool paper_order = false;    // standardize before splitting
  bool split_by_trial = false;
};

std::vector<Trial> load_trials(const std::string& manifest_path,
                               const LabelSet& labels) {
  auto entries = read_manifest(manifest_path, labels);
  std::vector<Trial> trials;
  trials.reserve(entries.size());
  for (const auto& e : entries)
    trials.push_back(ingest_trial(e.path, e.user_id, e.task));
  return trials;
}

int cmd_synth(const std::string& out_dir, int users, int samples,
              std::uint64_t seed, double noise) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = users;
  cfg.samples_per_trial = samples;
  cfg.seed = seed;
  cfg.noise_scale = noise;
  auto trials = generate(cfg);
  std::string manifest = write_synth_dataset(trials, cfg.tasks, out_dir);
  std::cout << "wrote " << trials.size() << " trials ("
            << trials.size() * std::size_t(samples) << " samples)\n"
            << "manifest: " << manifest << "\n"
            << "rng: " << kRngAlgorithm << " seed=" << seed << "\n";
  return 0;
}

int cmd_explore(const std::string& manifest_path, const std::string& out_svg,
                int k, std::uint64_t seed, bool signed_corr, int max_points) {
  LabelSet labels = LabelSet::default_tasks();
  auto trials = drop_invalid(load_trials(manifest_path, labels));
  Dataset ds = merge_and_label(trials, sample_field_names(), labels);

  if (static_cast<int>(ds.n()) > max_points)
    ds = stratified_sample(ds, max_points, seed);
  auto params = fit_standardizer(ds);
  Dataset z = apply_standardizer(params, ds);

  auto fused = build_fused_matrix(
      z, signed_corr ? CorrDistance::Signed : CorrDistance::Magnitude);
  auto proj = smacof_embed(fused, seed);
  for (Eigen::Index i = 0; i < z.n(); ++i)
    proj.points.push_back({PointKind::Data, labels.name(z.labels[i])});
  for (const auto& f : z.feature_names)
    proj.points.push_back({PointKind::Variable, f});
  emit_projection(proj, out_svg);

  std::cout << "projection: " << out_svg << " (stress " << std::setprecision(6)
            << proj.stress << ", " << proj.iterations << " iterations)\n";
  std::cout << "selected features:";
  for (const auto& f : select_features(z, k)) std::cout << ' ' << f;
  std::cout << "\n";
  return 0;
}

double accuracy_of(const PipelineModel& model, const Dataset& raw,
                   EvalLevel level) {
  auto report = evaluate([&](const Vector& x) { return model.predict(x); },
                         raw, level);
  return report.accuracy;
}

int cmd_train(const std::string& manifest_path, const std::string& out_model,
              const CommonOpts& common, const std::string& classifier,
              double c, const std::string& kernel_name,
              const std::string& gamma_opt, int estimators, int depth,
              bool resample, int sample_n) {
  LabelSet labels = LabelSet::default_tasks();
  auto trials = drop_invalid(load_trials(manifest_path, labels));
  Dataset ds = merge_and_label(trials, common.features, labels);

  SplitSpec split_spec;
  split_spec.test_fraction = common.test_fraction;
  split_spec.validation_fraction = common.validation_fraction;
  split_spec.seed = common.seed;
  split_spec.by_trial = common.split_by_trial;

  PipelineModel model;
  model.classifier = classifier;
  model.classes = labels;

  Split split;
  if (common.paper_order) {
    model.standardizer = fit_standardizer(ds);
    split = shuffle_split(apply_standardizer(model.standardizer, ds),
                          split_spec);
  } else {
    split = shuffle_split(ds, split_spec);
    model.standardizer = fit_standardizer(split.train);
  }

  Dataset train = common.paper_order
                      ? split.train
                      : apply_standardizer(model.standardizer, split.train);
  if (sample_n > 0 && sample_n < train.n())
    train = stratified_sample(train, sample_n, common.seed);

  if (classifier == "svm") {
    SmoParams p;
    p.c = c;
    p.seed = common.seed;
    if (kernel_name == "linear") {
      p.kernel.kind = KernelKind::Linear;
    } else if (kernel_name == "rbf") {
      p.kernel.kind = KernelKind::Rbf;
      p.kernel.gamma = (gamma_opt == "scale") ? gamma_scale(train.rows)
                                              : std::stod(gamma_opt);
    } else {
      throw ConfigError("unknown kernel: " + kernel_name);
    }
    model.svm = train_ovr(train, p);
  } else if (classifier == "adaboost") {
    AdaBoostParams p;
    p.n_estimators = estimators;
    p.max_depth = depth;
    p.seed = common.seed;
    p.resample = resample;
    model.adaboost = train_adaboost(train, p);
  } else {
    throw ConfigError("unknown classifier: " + classifier);
  }

  save_model(model, out_model);

  // Report accuracy on the un-restandardized splits; the model itself
  // applies the stored standardizer.
  Dataset train_raw = split.train, val_raw = split.validation;
  if (common.paper_order) {
    // Splits are already standardized; undo for the model's predictor.
    auto undo = [&](Dataset& d) {
      d.rows = (d.rows.array().rowwise() *
                model.standardizer.stddev.transpose().array())
                   .rowwise() +
               model.standardizer.mean.transpose().array();
    };
    undo(train_raw);
    undo(val_raw);
  }
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "model: " << out_model << "\n";
  std::cout << "train accuracy (sample): "
            << accuracy_of(model, train_raw, EvalLevel::Sample) << "\n";
  std::cout << "validation accuracy (sample): "
            << accuracy_of(model, val_raw, EvalLevel::Sample) << "\n";
  std::cout << "validation accuracy (trial): "
            << accuracy_of(model, val_raw, EvalLevel::Trial) << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& trial_csv) {
  PipelineModel model = load_model(model_path);
  Trial trial = ingest_trial(trial_csv, "query", 0);
  auto kept = drop_invalid({trial});
  if (kept[0].samples.empty()) throw DataError("no valid samples");

  Dataset ds =
      merge_and_label(kept, model.standardizer.feature_names, model.classes);
  std::vector<long> tally(model.classes.size(), 0);
  std::vector<TaskLabel> preds;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    TaskLabel p = model.predict(ds.rows.row(i).transpose());
    tally[p]++;
    preds.push_back(p);
  }
  std::cout << "predicted task: " << model.classes.name(mode_label(preds))
            << "\n";
  for (int c = 0; c < model.classes.size(); ++c)
    std::cout << "  " << model.classes.name(c) << ": " << tally[c] << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model_path,
                 const std::string& manifest_path, const std::string& level,
                 const std::string& out_path) {
  PipelineModel model = load_model(model_path);
  auto trials = drop_invalid(load_trials(manifest_path, model.classes));
  Dataset ds =
      merge_and_label(trials, model.standardizer.feature_names, model.classes);
  EvalLevel lvl = (level == "trial") ? EvalLevel::Trial : EvalLevel::Sample;
  auto report = evaluate([&](const Vector& x) { return model.predict(x); },
                         ds, lvl);
  std::cout << format_report(report);
  if (!out_path.empty()) render_report(report, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eye-movement task decoding toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts common;
  // Flat config surface shared by the pipeline commands.
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "RNG seed (mt19937_64)")
        ->envname("EYETASK_SEED");
    sub->add_option("--features", common.features, "feature columns");
    sub->add_option("--test-frac", common.test_fraction);
    sub->add_option("--val-frac", common.validation_fraction);
    sub->add_flag("--paper-order", common.paper_order,
                  "standardize before splitting");
    sub->add_flag("--split-by-trial", common.split_by_trial,
                  "stratify whole trials instead of rows");
  };

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_out = "synth_data";
  int synth_users = 10, synth_samples = 1000;
  std::uint64_t synth_seed = 0;
  double synth_noise = 1.0;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--users", synth_users);
  synth->add_option("--samples", synth_samples, "samples per trial");
  synth->add_option("--seed", synth_seed)->envname("EYETASK_SEED");
  synth->add_option("--noise", synth_noise, "dispersion scale");

  // explore
  auto* explore = app.add_subcommand("explore", "data context map projection");
  std::string ex_manifest, ex_out = "dcm.svg";
  int ex_k = 5, ex_max_points = 2000;
  std::uint64_t ex_seed = 0;
  bool ex_signed = false;
  explore->add_option("--manifest", ex_manifest)->required();
  explore->add_option("--out", ex_out, "output SVG path");
  explore->add_option("-k,--select", ex_k, "features to select");
  explore->add_option("--seed", ex_seed)->envname("EYETASK_SEED");
  explore->add_flag("--signed", ex_signed,
                    "use (1-rho)/2 correlation distance");
  explore->add_option("--max-points", ex_max_points,
                      "subsample cap for the data block");

  // train
  auto* train = app.add_subcommand("train", "train a classifier pipeline");
  std::string tr_manifest, tr_out = "model.txt", tr_classifier = "adaboost";
  std::string tr_kernel = "rbf", tr_gamma = "scale";
  double tr_c = 1000;
  int tr_estimators = 100, tr_depth = 6, tr_sample_n = 0;
  bool tr_resample = false;
  train->add_option("--manifest", tr_manifest)->required();
  train->add_option("--out", tr_out, "model file path");
  train->add_option("--classifier", tr_classifier, "svm or adaboost");
  train->add_option("-C,--cost", tr_c, "SVM soft-margin cost");
  train->add_option("--kernel", tr_kernel, "linear or rbf");
  train->add_option("--gamma", tr_gamma, "rbf gamma, or 'scale'");
  train->add_option("--estimators", tr_estimators, "boosting rounds");
  train->add_option("--depth", tr_depth, "tree max depth");
  train->add_option("--sample-n", tr_sample_n,
                    "stratified subsample of the training split (0 = all)");
  train->add_flag("--resample", tr_resample,
                  "boost by literal probability resampling");
  add_common(train);

  // predict
  auto* predict = app.add_subcommand("predict", "predict one trial's task");
  std::string pr_model, pr_trial;
  predict->add_option("--model", pr_model)->required();
  predict->add_option("--trial", pr_trial)->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a labelled dataset");
  std::string ev_model, ev_manifest, ev_level = "trial", ev_out;
  eval_cmd->add_option("--model", ev_model)->required();
  eval_cmd->add_option("--manifest", ev_manifest)->required();
  eval_cmd->add_option("--level", ev_level, "sample or trial");
  eval_cmd->add_option("--out", ev_out, "report file path");

  try {
    app.parse(argc, argv);
    if (synth->parsed())
      return cmd_synth(synth_out, synth_users, synth_samples, synth_seed,
                       synth_noise);
    if (explore->parsed())
      return cmd_explore(ex_manifest, ex_out, ex_k, ex_seed, ex_signed,
                         ex_max_points);
    if (train->parsed())
      return cmd_train(tr_manifest, tr_out, common, tr_classifier, tr_c,
                       tr_kernel, tr_gamma, tr_estimators, tr_depth,
                       tr_resample, tr_sample_n);
    if (predict->parsed()) return cmd_predict(pr_model, pr_trial);
    if (eval_cmd->parsed())
      return cmd_evaluate(ev_model, ev_manifest, ev_level, ev_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 4;
  }
}
