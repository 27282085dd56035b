#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uwb {

inline constexpr std::size_t kFastTimeBins = 256;
inline constexpr double kAmplitudeMin = 0.0;
inline constexpr double kAmplitudeMax = 100.0;

// Rest = stationary scene; Move = one out-and-back motion episode.
enum class StateLabel { Rest, Move };

std::string to_string(StateLabel label);
std::optional<StateLabel> parse_state_label(std::string_view text);

// One received radar sweep: normalized signal strength per fast-time bin.
struct Frame {
  std::array<double, kFastTimeBins> samples{};
};

// T-by-256 block of frames for one recording; the unit of classification.
struct FrameSet {
  std::vector<Frame> frames;
  double fps = 200.0;
  std::optional<StateLabel> label;
  std::string id;
  // Clutter-reduced frames may leave [0,100]; raw captures may not.
  bool clutter_reduced = false;

  std::size_t frame_count() const { return frames.size(); }
};

// Variable-length sequence of d-dimensional feature steps, stored row-major.
struct FeatureSequence {
  std::vector<double> values;
  std::size_t dim = 1;

  std::size_t length() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> step(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
};

struct DatasetManifest {
  std::string participant;
  std::optional<std::int64_t> seed;  // master seed when synthetic
};

// Labeled frame sets for one participant.
struct Dataset {
  DatasetManifest manifest;
  std::vector<FrameSet> frame_sets;

  std::size_t size() const { return frame_sets.size(); }
};

// Throw ValidationError naming the offending element on any violation.
void validate_frame_set(const FrameSet& fs);
void validate_feature_sequence(const FeatureSequence& seq);
void validate_dataset(const Dataset& dataset);

}  // namespace uwb
