#pragma once

#include <span>
#include <vector>

#include "uwb/types.hpp"

namespace uwb {

inline constexpr std::size_t kEnvelopeWindow = 400;
inline constexpr std::size_t kDecimationFactor = 1024;

// Frames laid end to end in slow-time order: out[i*256 + j] = frames[i][j].
std::vector<double> concatenate(const FrameSet& fs);

// Same-length sliding RMS: out[k] is the RMS over the centered window
// [k - w/2, k + ceil(w/2) - 1] clipped to the signal; edge windows shrink.
std::vector<double> rms_envelope(std::span<const double> signal,
                                 std::size_t window = kEnvelopeWindow);

// Point-sampling at multiples of factor; length floor(N/factor).
std::vector<double> decimate(std::span<const double> env, std::size_t factor = kDecimationFactor);

std::vector<double> remove_dc(std::span<const double> x);

// remove_dc(decimate(rms_envelope(concatenate(fs)))): a 1-D sequence of
// length floor(T/4) whose fluctuation reflects target motion.
FeatureSequence extract_feature(const FrameSet& fs, std::size_t window = kEnvelopeWindow,
                                std::size_t factor = kDecimationFactor);

}  // namespace uwb
