#include "uwb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rng.hpp"
#include "uwb/errors.hpp"

namespace uwb {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_template(const PulseTemplate& tpl) {
  const std::size_t m = tpl.size();
  if (m < 5 || m % 2 == 0)
    throw ValidationError("pulse template length must be odd and >= 5, got " + std::to_string(m));
  double peak = 0.0;
  for (double t : tpl.taps) {
    if (!std::isfinite(t)) throw ValidationError("pulse template contains a non-finite tap");
    peak = std::max(peak, std::abs(t));
  }
  if (std::abs(peak - 1.0) > 1e-12)
    throw ValidationError("pulse template is not peak-normalized");
}

void validate_sim_config(const SimConfig& cfg) {
  validate_template(cfg.pulse);
  const std::size_t m = cfg.pulse.size();
  if (cfg.frame_count == 0) throw ValidationError("frame_count must be >= 1");
  if (!(cfg.fps > 0.0)) throw ValidationError("fps must be positive");
  if (!(cfg.noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  if (cfg.target_rest_delay + cfg.move_extent > kFastTimeBins - 1 - m)
    throw ValidationError("reflector path exceeds the fast-time window: rest delay " +
                          std::to_string(cfg.target_rest_delay) + " + extent " +
                          std::to_string(cfg.move_extent) + " > " +
                          std::to_string(kFastTimeBins - 1 - m));
  if (cfg.move_start >= cfg.move_end || cfg.move_end > cfg.frame_count)
    throw ValidationError("move window [" + std::to_string(cfg.move_start) + ", " +
                          std::to_string(cfg.move_end) + ") invalid for T=" +
                          std::to_string(cfg.frame_count));
  for (double c : cfg.clutter)
    if (!std::isfinite(c) || c < kAmplitudeMin || c > kAmplitudeMax)
      throw ValidationError("clutter profile values must be finite and in [0,100]");
}

}  // namespace

PulseTemplate default_template(std::size_t taps) {
  if (taps < 5 || taps % 2 == 0)
    throw ValidationError("template length must be odd and >= 5, got " + std::to_string(taps));
  PulseTemplate tpl;
  tpl.taps.resize(taps);
  const double center = static_cast<double>(taps - 1) / 2.0;
  const double sigma = static_cast<double>(taps) / 7.0;
  const double cycles = 1.5;  // wideband monocycle-like: ~1.5 carrier cycles
  for (std::size_t i = 0; i < taps; ++i) {
    const double x = static_cast<double>(i) - center;
    tpl.taps[i] = std::exp(-0.5 * (x / sigma) * (x / sigma)) *
                  std::cos(2.0 * kPi * cycles * x / static_cast<double>(taps));
  }
  double peak = 0.0;
  for (double t : tpl.taps) peak = std::max(peak, std::abs(t));
  for (double& t : tpl.taps) t /= peak;
  return tpl;
}

std::size_t frames_for_duration(double fps, double seconds) {
  if (!(fps > 0.0) || !(seconds > 0.0))
    throw ValidationError("fps and duration must be positive");
  return static_cast<std::size_t>(std::llround(fps * seconds));
}

std::array<double, kFastTimeBins> random_clutter(std::uint64_t seed) {
  detail::Rng rng(detail::splitmix64(seed ^ 0xC1A77E5ull));
  std::array<double, kFastTimeBins> clutter{};
  const double base = 14.0 + 4.0 * rng.uniform();
  for (double& c : clutter) c = base;
  // broad reflections
  const int bumps = 5;
  for (int b = 0; b < bumps; ++b) {
    const double center = rng.uniform() * (kFastTimeBins - 1);
    const double width = 6.0 + 24.0 * rng.uniform();
    const double height = 4.0 + 8.0 * rng.uniform();
    for (std::size_t j = 0; j < kFastTimeBins; ++j) {
      const double x = (static_cast<double>(j) - center) / width;
      clutter[j] += height * std::exp(-0.5 * x * x);
    }
  }
  // strong structure near the pulse carrier scale (about 20 bins for the
  // default template): the pulse-clutter cross term then swings as the
  // reflector slides, whatever the bump draw looks like
  const double ripple_period = 19.0 + 3.0 * rng.uniform();
  const double ripple_phase = 2.0 * kPi * rng.uniform();
  const double ripple_amp = 13.0 + 3.0 * rng.uniform();
  for (std::size_t j = 0; j < kFastTimeBins; ++j)
    clutter[j] +=
        ripple_amp * std::sin(2.0 * kPi * static_cast<double>(j) / ripple_period + ripple_phase);
  // fine per-bin texture
  for (double& c : clutter) {
    c += 4.0 * rng.uniform();
    c = std::clamp(c, 0.0, 50.0);
  }
  return clutter;
}

SimConfig default_sim_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.clutter = random_clutter(seed);
  return cfg;
}

std::size_t reflector_delay(const SimConfig& cfg, StateLabel label, std::size_t t) {
  if (label == StateLabel::Rest || t < cfg.move_start || t >= cfg.move_end)
    return cfg.target_rest_delay;
  const double phase = static_cast<double>(t - cfg.move_start) /
                       static_cast<double>(cfg.move_end - cfg.move_start);
  const long excursion = std::lround(static_cast<double>(cfg.move_extent) * std::sin(kPi * phase));
  return cfg.target_rest_delay + static_cast<std::size_t>(excursion);
}

FrameSet generate_frame_set(const SimConfig& cfg, StateLabel label) {
  validate_sim_config(cfg);

  FrameSet fs;
  fs.fps = cfg.fps;
  fs.label = label;
  fs.frames.resize(cfg.frame_count);

  detail::Rng rng(cfg.seed);
  const std::size_t m = cfg.pulse.size();
  for (std::size_t t = 0; t < cfg.frame_count; ++t) {
    Frame& frame = fs.frames[t];
    frame.samples = cfg.clutter;
    const std::size_t delay = reflector_delay(cfg, label, t);
    for (std::size_t i = 0; i < m; ++i)
      frame.samples[delay + i] += cfg.target_amp * cfg.pulse.taps[i];
    if (cfg.noise_sigma > 0.0)
      for (double& v : frame.samples) v += cfg.noise_sigma * rng.normal();
    for (double& v : frame.samples) v = std::clamp(v, kAmplitudeMin, kAmplitudeMax);
  }
  return fs;
}

Dataset generate_dataset(const SimConfig& cfg, std::size_t n_per_state, std::size_t t_min,
                         std::size_t t_max, const std::string& participant) {
  if (n_per_state < 1) throw ValidationError("n_per_state must be >= 1");
  if (t_min == 0 || t_min > t_max)
    throw ValidationError("frame-count range [" + std::to_string(t_min) + ", " +
                          std::to_string(t_max) + "] is empty");

  Dataset dataset;
  dataset.manifest.participant = participant;
  dataset.manifest.seed = static_cast<std::int64_t>(cfg.seed);

  detail::Rng master(detail::splitmix64(cfg.seed));
  const std::size_t total = 2 * n_per_state;
  for (std::size_t i = 0; i < total; ++i) {
    const StateLabel label = i < n_per_state ? StateLabel::Rest : StateLabel::Move;
    const std::size_t t = t_min + master.uniform_int(t_max - t_min + 1);

    SimConfig set_cfg = cfg;
    set_cfg.frame_count = t;
    set_cfg.seed = detail::splitmix64(cfg.seed + 1 + i);  // counter-derived per-set seed
    // keep the movement episode at the same relative position for every T
    const double scale = static_cast<double>(t) / static_cast<double>(cfg.frame_count);
    std::size_t start = static_cast<std::size_t>(std::llround(cfg.move_start * scale));
    std::size_t end = static_cast<std::size_t>(std::llround(cfg.move_end * scale));
    start = std::min(start, t - 1);
    end = std::clamp<std::size_t>(end, start + 1, t);
    set_cfg.move_start = start;
    set_cfg.move_end = end;

    FrameSet fs = generate_frame_set(set_cfg, label);
    const std::size_t index = i % n_per_state;
    char id[32];
    std::snprintf(id, sizeof(id), "%s_%02zu", label == StateLabel::Rest ? "rest" : "move", index);
    fs.id = id;
    dataset.frame_sets.push_back(std::move(fs));
  }
  return dataset;
}

}  // namespace uwb
