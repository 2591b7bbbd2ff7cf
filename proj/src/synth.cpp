#include "eyetask/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace eyetask {

namespace {

constexpr double kScreenW = 1920, kScreenH = 1080;
constexpr double kCenterX = kScreenW / 2, kCenterY = kScreenH / 2;

// splitmix64 step, used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double clampd(double v, double lo, double hi) {
  return std::clamp(v, lo, hi);
}

}  // namespace

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.task_profiles.resize(4);
  // Blank: tight stationary fixation, small stable pupil.
  c.task_profiles[0] = {.gaze_dispersion = 25,
                        .pupil_mean = 880,
                        .pupil_std = 45,
                        .blink_rate = 0.01};
  // Waldo: wide scanning with long saccadic jumps, dilated pupil.
  c.task_profiles[1] = {.gaze_dispersion = 45,
                        .saccade_period = 18,
                        .saccade_span = 820,
                        .pupil_mean = 1280,
                        .pupil_std = 80,
                        .blink_rate = 0.015};
  // Natural: medium dispersion with smooth drift.
  c.task_profiles[2] = {.gaze_dispersion = 55,
                        .drift_rate = 6,
                        .pupil_mean = 1090,
                        .pupil_std = 70,
                        .blink_rate = 0.01};
  // Puzzle: left/right region alternation; pupil overlaps Natural so the
  // synthetic confusion matrix echoes the hard-task ordering.
  c.task_profiles[3] = {.gaze_dispersion = 50,
                        .alternate = true,
                        .pupil_mean = 1045,
                        .pupil_std = 70,
                        .blink_rate = 0.012};
  return c;
}

namespace {

Trial generate_trial(const SynthConfig& cfg, int user, TaskLabel task) {
  const TaskProfile& base = cfg.task_profiles[task];
  Rng rng(mix_seed(cfg.seed, std::uint64_t(user) * 131 + task));
  std::normal_distribution<double> gauss(0, 1);
  std::uniform_real_distribution<double> unif(0, 1);

  // Per-trial variability: pupil baseline shift, gaze calibration offset,
  // and region placement.
  const double pupil_mean = base.pupil_mean + 20.0 * gauss(rng);
  const double disp = base.gaze_dispersion * cfg.noise_scale;
  const double off_x = 150.0 * gauss(rng);
  const double off_y = 90.0 * gauss(rng);
  const double left_x = 380 + 340 * unif(rng);
  const double right_x = 1220 + 340 * unif(rng);

  Trial trial;
  trial.user_id = "u" + std::to_string(user);
  trial.task = task;
  trial.samples.reserve(cfg.samples_per_trial);

  double tx = kCenterX, ty = kCenterY;
  double vx = 0, vy = 0;
  int countdown = 0;
  bool on_left = unif(rng) < 0.5;

  for (int i = 0; i < cfg.samples_per_trial; ++i) {
    if (base.saccade_period > 0) {
      if (countdown-- <= 0) {
        tx = kCenterX + base.saccade_span * (unif(rng) * 2 - 1);
        ty = kCenterY + base.saccade_span * 0.55 * (unif(rng) * 2 - 1);
        countdown =
            static_cast<int>(base.saccade_period * (0.6 + 0.8 * unif(rng)));
      }
    } else if (base.alternate) {
      if (countdown-- <= 0) {
        on_left = !on_left;
        tx = on_left ? left_x : right_x;
        ty = kCenterY + 120 * (unif(rng) * 2 - 1);
        countdown = static_cast<int>(30 + 20 * unif(rng));
      }
    } else if (base.drift_rate > 0) {
      vx = 0.95 * vx + 0.5 * base.drift_rate * gauss(rng);
      vy = 0.95 * vy + 0.35 * base.drift_rate * gauss(rng);
      tx += vx;
      ty += vy;
      if (tx < 400 || tx > 1520) vx = -vx;
      if (ty < 260 || ty > 820) vy = -vy;
      tx = clampd(tx, 400, 1520);
      ty = clampd(ty, 260, 820);
    }

    GazeSample s;
    s.time_ms = std::int64_t(i) * 4;
    s.lx_pix = clampd(tx + off_x + disp * gauss(rng), 0, kScreenW);
    s.ly_pix = clampd(ty + off_y + disp * gauss(rng), 0, kScreenH);
    s.lx_href = (s.lx_pix - kCenterX) * 0.65 + 12 * gauss(rng);
    s.ly_href = (s.ly_pix - kCenterY) * 0.65 + 12 * gauss(rng);
    s.lp = pupil_mean + base.pupil_std * gauss(rng);
    s.rp = s.lp * 0.97 + 12 * gauss(rng);
    if (unif(rng) < base.blink_rate) s.lp = s.rp = 0;  // blink signature
    trial.samples.push_back(s);
  }
  return trial;
}

}  // namespace

std::vector<Trial> generate(const SynthConfig& config) {
  if (config.n_users <= 0 || config.samples_per_trial <= 0)
    throw ConfigError("synth counts must be positive");
  if (config.noise_scale <= 0) throw ConfigError("noise_scale must be positive");
  if (static_cast<int>(config.task_profiles.size()) != config.tasks.size())
    throw ConfigError("one task profile required per task");
  for (const auto& p : config.task_profiles)
    if (p.blink_rate < 0 || p.blink_rate >= 1)
      throw ConfigError("blink rate must lie in [0, 1)");

  std::vector<Trial> trials;
  trials.reserve(std::size_t(config.n_users) * config.tasks.size());
  for (int u = 0; u < config.n_users; ++u)
    for (int t = 0; t < config.tasks.size(); ++t)
      trials.push_back(generate_trial(config, u, t));
  return trials;
}

std::string write_synth_dataset(const std::vector<Trial>& trials,
                                const LabelSet& tasks,
                                const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::string manifest_path = (fs::path(dir) / "manifest.csv").string();
  std::ofstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot write manifest: " + manifest_path);
  manifest << "path,user_id,task\n";

  for (size_t i = 0; i < trials.size(); ++i) {
    const Trial& t = trials[i];
    std::string name = t.user_id + "_" + tasks.name(t.task) + ".csv";
    std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trial file: " + path);
    out << "time,lx_pix,ly_pix,lx_href,ly_href,lp,rp\n"
        << std::fixed << std::setprecision(3);
    for (const auto& s : t.samples)
      out << s.time_ms << ',' << s.lx_pix << ',' << s.ly_pix << ','
          << s.lx_href << ',' << s.ly_href << ',' << s.lp << ',' << s.rp
          << '\n';
    manifest << name << ',' << t.user_id << ',' << tasks.name(t.task) << '\n';
  }
  return manifest_path;
}

}  // namespace eyetask
