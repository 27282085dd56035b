#include "uwb/features.hpp"

#include <algorithm>
#include <cmath>

#include "uwb/errors.hpp"

namespace uwb {

std::vector<double> concatenate(const FrameSet& fs) {
  validate_frame_set(fs);
  std::vector<double> out;
  out.reserve(fs.frames.size() * kFastTimeBins);
  for (const Frame& frame : fs.frames)
    out.insert(out.end(), frame.samples.begin(), frame.samples.end());
  return out;
}

std::vector<double> rms_envelope(std::span<const double> signal, std::size_t window) {
  const std::size_t n = signal.size();
  if (n == 0) throw ValidationError("rms_envelope: empty signal");
  if (window < 1) throw ValidationError("rms_envelope: window must be >= 1");

  const std::size_t half_lo = window / 2;
  const std::size_t half_hi = window - half_lo;  // ceil(window/2)
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half_lo ? k - half_lo : 0;
    const std::size_t hi = std::min(n - 1, k + half_hi - 1);
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) sum += signal[i] * signal[i];
    out[k] = std::sqrt(sum / static_cast<double>(hi - lo + 1));
  }
  return out;
}

std::vector<double> decimate(std::span<const double> env, std::size_t factor) {
  if (factor < 1) throw ValidationError("decimate: factor must be >= 1");
  if (factor > env.size())
    throw ValidationError("decimate: factor " + std::to_string(factor) +
                          " exceeds signal length " + std::to_string(env.size()));
  std::vector<double> out(env.size() / factor);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = env[k * factor];
  return out;
}

std::vector<double> remove_dc(std::span<const double> x) {
  if (x.empty()) throw ValidationError("remove_dc: empty sequence");
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - mean;
  return out;
}

FeatureSequence extract_feature(const FrameSet& fs, std::size_t window, std::size_t factor) {
  if (fs.frame_count() * kFastTimeBins < factor)
    throw ValidationError("frame set '" + fs.id + "' too short: T=" +
                          std::to_string(fs.frame_count()) + " gives fewer than " +
                          std::to_string(factor) + " samples");
  FeatureSequence feature;
  feature.dim = 1;
  feature.values = remove_dc(decimate(rms_envelope(concatenate(fs), window), factor));
  return feature;
}

}  // namespace uwb
