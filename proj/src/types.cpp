#include "uwb/types.hpp"

#include <cmath>
#include <unordered_set>

#include "uwb/errors.hpp"

namespace uwb {

std::string to_string(StateLabel label) {
  return label == StateLabel::Rest ? "Rest" : "Move";
}

std::optional<StateLabel> parse_state_label(std::string_view text) {
  if (text == "Rest") return StateLabel::Rest;
  if (text == "Move") return StateLabel::Move;
  return std::nullopt;
}

void validate_frame_set(const FrameSet& fs) {
  const std::string name = fs.id.empty() ? "<unnamed>" : fs.id;
  if (fs.frames.empty())
    throw ValidationError("frame set '" + name + "' has no frames");
  if (!(fs.fps > 0.0))
    throw ValidationError("frame set '" + name + "' has non-positive fps");
  for (std::size_t i = 0; i < fs.frames.size(); ++i) {
    for (std::size_t j = 0; j < kFastTimeBins; ++j) {
      const double v = fs.frames[i].samples[j];
      if (!std::isfinite(v))
        throw ValidationError("frame set '" + name + "': non-finite sample at frame " +
                              std::to_string(i) + ", bin " + std::to_string(j));
      if (!fs.clutter_reduced && (v < kAmplitudeMin || v > kAmplitudeMax))
        throw ValidationError("frame set '" + name + "': sample out of [0,100] at frame " +
                              std::to_string(i) + ", bin " + std::to_string(j));
    }
  }
}

void validate_feature_sequence(const FeatureSequence& seq) {
  if (seq.dim == 0) throw ValidationError("feature sequence has dimension 0");
  if (seq.values.empty()) throw ValidationError("feature sequence is empty");
  if (seq.values.size() % seq.dim != 0)
    throw ValidationError("feature sequence value count is not a multiple of its dimension");
  for (double v : seq.values)
    if (!std::isfinite(v)) throw ValidationError("feature sequence contains a non-finite value");
}

void validate_dataset(const Dataset& dataset) {
  std::unordered_set<std::string> seen;
  for (const FrameSet& fs : dataset.frame_sets) {
    if (!fs.label.has_value())
      throw ValidationError("frame set '" + fs.id + "' has no label");
    if (fs.id.empty()) throw ValidationError("dataset contains a frame set with an empty id");
    if (!seen.insert(fs.id).second)
      throw ValidationError("duplicate frame set id '" + fs.id + "'");
    validate_frame_set(fs);
  }
}

}  // namespace uwb
