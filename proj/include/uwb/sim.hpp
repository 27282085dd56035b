#pragma once

#include <cstdint>
#include <string>

#include "uwb/types.hpp"

namespace uwb {

// Peak-normalized pulse shape: used both to synthesize echoes and as the
// matched template for CLEAN detection.
struct PulseTemplate {
  std::vector<double> taps;

  std::size_t size() const { return taps.size(); }
};

// Gabor pulse (Gaussian-windowed cosine) of odd length, peak-normalized.
PulseTemplate default_template(std::size_t taps = 31);

// One static reflector over a fixed clutter background. The Move state slides
// the reflector out to target_rest_delay + move_extent and back along a
// half-sine path inside [move_start, move_end).
struct SimConfig {
  std::size_t frame_count = 400;  // T
  double fps = 200.0;
  double noise_sigma = 1.0;
  std::array<double, kFastTimeBins> clutter{};
  double target_amp = 30.0;
  std::size_t target_rest_delay = 80;
  std::size_t move_extent = 60;
  std::size_t move_start = 100;
  std::size_t move_end = 300;
  std::uint64_t seed = 0;
  PulseTemplate pulse = default_template();
};

std::size_t frames_for_duration(double fps, double seconds);

// Smooth random background profile, bounded well below the amplitude ceiling
// so a planted reflector does not saturate.
std::array<double, kFastTimeBins> random_clutter(std::uint64_t seed);

SimConfig default_sim_config(std::uint64_t seed);

// Ground-truth reflector delay at frame t; what the CLEAN track should find.
std::size_t reflector_delay(const SimConfig& cfg, StateLabel label, std::size_t t);

// Deterministic in cfg (including seed).
FrameSet generate_frame_set(const SimConfig& cfg, StateLabel label);

// 2*n_per_state labeled frame sets; per-set T drawn uniformly from
// [t_min, t_max] and per-set seeds derived from cfg.seed by counter.
Dataset generate_dataset(const SimConfig& cfg, std::size_t n_per_state, std::size_t t_min,
                         std::size_t t_max, const std::string& participant = "synthetic");

}  // namespace uwb
