#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eyetask/boosting.hpp"
#include "eyetask/preprocess.hpp"
#include "eyetask/synth.hpp"

using namespace eyetask;

namespace {

double gaze_std(const Trial& t) {
  double mx = 0, my = 0;
  for (const auto& s : t.samples) {
    mx += s.lx_pix;
    my += s.ly_pix;
  }
  mx /= t.samples.size();
  my /= t.samples.size();
  double var = 0;
  for (const auto& s : t.samples)
    var += (s.lx_pix - mx) * (s.lx_pix - mx) +
           (s.ly_pix - my) * (s.ly_pix - my);
  return std::sqrt(var / t.samples.size());
}

}  // namespace

TEST_CASE("generate is deterministic in the seed") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 3;
  cfg.samples_per_trial = 200;
  cfg.seed = 77;
  auto a = generate(cfg);
  auto b = generate(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t t = 0; t < a.size(); ++t) {
    REQUIRE(a[t].samples.size() == b[t].samples.size());
    for (size_t i = 0; i < a[t].samples.size(); ++i) {
      CHECK(a[t].samples[i].lx_pix == b[t].samples[i].lx_pix);
      CHECK(a[t].samples[i].lp == b[t].samples[i].lp);
    }
  }
}

TEST_CASE("generate counts trials and samples") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 10;
  cfg.samples_per_trial = 1000;
  auto trials = generate(cfg);
  CHECK(trials.size() == 40);
  size_t total = 0;
  for (const auto& t : trials) total += t.samples.size();
  CHECK(total == 40000);
}

TEST_CASE("blank dispersion below waldo dispersion for every seed") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SynthConfig cfg = SynthConfig::defaults();
    cfg.n_users = 1;
    cfg.samples_per_trial = 400;
    cfg.seed = seed;
    auto trials = generate(cfg);
    CHECK(gaze_std(trials[0]) < gaze_std(trials[1]));  // Blank < Waldo
  }
}

TEST_CASE("blink fraction tracks the configured rate") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 5;
  cfg.samples_per_trial = 2000;
  cfg.seed = 9;
  auto trials = generate(cfg);
  for (int task = 0; task < 4; ++task) {
    long blinks = 0, total = 0;
    for (const auto& t : trials) {
      if (t.task != task) continue;
      for (const auto& s : t.samples) {
        ++total;
        if (s.lp <= 0) ++blinks;
      }
    }
    CHECK(total >= 10000);
    double rate = double(blinks) / double(total);
    CHECK(std::abs(rate - cfg.task_profiles[task].blink_rate) <= 0.02);
  }
}

TEST_CASE("classes are learnable by a single depth-6 tree") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 8;
  cfg.samples_per_trial = 300;
  cfg.seed = 123;
  auto trials = drop_invalid(generate(cfg));
  Dataset ds = merge_and_label(
      trials, {"lx_pix", "ly_pix", "lx_href", "ly_href", "lp"},
      cfg.tasks);

  SplitSpec spec;
  spec.seed = 1;
  Split split = shuffle_split(ds, spec);
  auto params = fit_standardizer(split.train);
  Dataset train = apply_standardizer(params, split.train);
  Dataset test = apply_standardizer(params, split.test);

  auto tree = train_tree(train.rows, train.labels,
                         Vector::Constant(train.n(), 1.0 / double(train.n())),
                         6, 4);
  int correct = 0;
  for (Eigen::Index i = 0; i < test.n(); ++i)
    if (tree.predict(test.rows.row(i).transpose()) == test.labels[i])
      ++correct;
  CHECK(double(correct) / double(test.n()) > 0.6);
}

TEST_CASE("write_synth_dataset emits ingestible files") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 2;
  cfg.samples_per_trial = 50;
  cfg.seed = 3;
  auto trials = generate(cfg);

  auto dir = std::filesystem::temp_directory_path() / "eyetask_synth_test";
  std::filesystem::remove_all(dir);
  auto manifest = write_synth_dataset(trials, cfg.tasks, dir.string());

  auto entries = read_manifest(manifest, cfg.tasks);
  CHECK(entries.size() == 8);
  Trial round_trip = ingest_trial(entries[0].path, entries[0].user_id,
                                  entries[0].task);
  CHECK(round_trip.samples.size() == 50);
  CHECK(round_trip.task == trials[0].task);
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate validates its config") {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_users = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = SynthConfig::defaults();
  cfg.task_profiles[2].blink_rate = 1.0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
}
