#pragma once

#include "uwb/sim.hpp"
#include "uwb/types.hpp"

namespace uwb {

// Conventional CLEAN correlates against the full pulse template; the
// short-template variant keeps only a central fraction of the taps.
struct CleanVariant {
  enum class Kind { Conventional, ShortTemplate };

  Kind kind = Kind::Conventional;
  double fraction = 0.25;  // ShortTemplate only, in (0, 1]

  static CleanVariant conventional() { return {Kind::Conventional, 1.0}; }
  static CleanVariant short_template(double fraction = 0.25) {
    return {Kind::ShortTemplate, fraction};
  }
};

// Subtract the per-bin mean frame. Output frames are centered and may leave
// [0,100]; the result is flagged clutter_reduced.
FrameSet reduce_clutter(const FrameSet& fs);

// Conventional: the template unchanged. ShortTemplate(f): the central
// ceil(f*M) taps, rounded up to odd length, re-peak-normalized.
PulseTemplate effective_template(const PulseTemplate& tpl, const CleanVariant& variant);

struct Detection {
  std::size_t delay = 0;  // fast-time index of the strongest template match
  double strength = 0.0;  // least-squares template amplitude at that lag
};

// Strongest single-target match: delay = argmax_k |sum_m frame[k+m]*tpl[m]|
// over lags keeping the template inside the frame, ties to the smallest lag;
// strength = correlation at that lag divided by the template energy.
Detection clean_detect(const Frame& frame, const PulseTemplate& tpl);

// reduce_clutter then clean_detect per frame: a d=2 sequence of
// (delay, strength) steps, one per frame.
FeatureSequence track_targets(const FrameSet& fs, const PulseTemplate& tpl,
                              const CleanVariant& variant);

}  // namespace uwb
