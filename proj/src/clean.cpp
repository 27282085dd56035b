#include "uwb/clean.hpp"

#include <algorithm>
#include <cmath>

#include "uwb/errors.hpp"

namespace uwb {

namespace {

// Compensated dot product (Ogita-Rump-Oishi dot2), kept as an unevaluated
// hi+lo pair. The least-squares amplitude must reproduce a planted scale
// factor to the last bit, which plain double accumulation cannot do.
struct TwoFold {
  double hi = 0.0;
  double lo = 0.0;
};

TwoFold dot2(const double* x, const double* y, std::size_t n) {
  TwoFold acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = x[i] * y[i];
    const double pe = std::fma(x[i], y[i], -p);
    const double t = acc.hi + p;
    const double z = t - acc.hi;
    const double se = (acc.hi - (t - z)) + (p - z);
    acc.hi = t;
    acc.lo += pe + se;
  }
  return acc;
}

double divide(const TwoFold& num, const TwoFold& den) {
  const double q0 = num.hi / den.hi;
  const double r = std::fma(-q0, den.hi, num.hi);
  const double q1 = (r + num.lo - q0 * den.lo) / den.hi;
  return q0 + q1;
}

}  // namespace

FrameSet reduce_clutter(const FrameSet& fs) {
  validate_frame_set(fs);
  const std::size_t t = fs.frame_count();
  if (t < 2)
    throw ValidationError("clutter reduction needs at least 2 frames, frame set '" + fs.id +
                          "' has " + std::to_string(t));

  // mean computed as an offset from frame 0, so identical frames cancel to
  // exactly zero
  std::array<double, kFastTimeBins> mean{};
  for (const Frame& frame : fs.frames)
    for (std::size_t j = 0; j < kFastTimeBins; ++j)
      mean[j] += frame.samples[j] - fs.frames[0].samples[j];
  for (std::size_t j = 0; j < kFastTimeBins; ++j)
    mean[j] = fs.frames[0].samples[j] + mean[j] / static_cast<double>(t);

  FrameSet out = fs;
  out.clutter_reduced = true;
  for (Frame& frame : out.frames)
    for (std::size_t j = 0; j < kFastTimeBins; ++j) frame.samples[j] -= mean[j];
  return out;
}

PulseTemplate effective_template(const PulseTemplate& tpl, const CleanVariant& variant) {
  const std::size_t m = tpl.size();
  if (m == 0) throw ValidationError("empty pulse template");
  if (variant.kind == CleanVariant::Kind::Conventional) return tpl;

  if (!(variant.fraction > 0.0) || variant.fraction > 1.0)
    throw ValidationError("short-template fraction must be in (0,1]");
  std::size_t len =
      static_cast<std::size_t>(std::ceil(variant.fraction * static_cast<double>(m)));
  if (len % 2 == 0) ++len;
  len = std::min(len, m);
  if (len < 3)
    throw ValidationError("short template degenerates to " + std::to_string(len) +
                          " taps; need at least 3");

  const std::size_t center = (m - 1) / 2;
  const std::size_t half = (len - 1) / 2;
  PulseTemplate out;
  out.taps.assign(tpl.taps.begin() + static_cast<std::ptrdiff_t>(center - half),
                  tpl.taps.begin() + static_cast<std::ptrdiff_t>(center + half + 1));
  double peak = 0.0;
  for (double v : out.taps) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw ValidationError("short template has no nonzero taps");
  for (double& v : out.taps) v /= peak;
  return out;
}

Detection clean_detect(const Frame& frame, const PulseTemplate& tpl) {
  const std::size_t m = tpl.size();
  if (m == 0 || m > kFastTimeBins)
    throw ValidationError("template length must be in [1,256], got " + std::to_string(m));

  const std::size_t lag_count = kFastTimeBins - m + 1;
  std::size_t best_lag = 0;
  double best_abs = -1.0;
  for (std::size_t k = 0; k < lag_count; ++k) {
    double corr = 0.0;
    for (std::size_t i = 0; i < m; ++i) corr += frame.samples[k + i] * tpl.taps[i];
    const double mag = std::abs(corr);
    if (mag > best_abs) {  // ties keep the smallest lag
      best_abs = mag;
      best_lag = k;
    }
  }

  const TwoFold corr = dot2(frame.samples.data() + best_lag, tpl.taps.data(), m);
  const TwoFold energy = dot2(tpl.taps.data(), tpl.taps.data(), m);
  return {best_lag, divide(corr, energy)};
}

FeatureSequence track_targets(const FrameSet& fs, const PulseTemplate& tpl,
                              const CleanVariant& variant) {
  const PulseTemplate eff = effective_template(tpl, variant);
  const FrameSet reduced = reduce_clutter(fs);

  FeatureSequence track;
  track.dim = 2;
  track.values.reserve(2 * reduced.frame_count());
  for (const Frame& frame : reduced.frames) {
    const Detection det = clean_detect(frame, eff);
    track.values.push_back(static_cast<double>(det.delay));
    track.values.push_back(det.strength);
  }
  return track;
}

}  // namespace uwb
