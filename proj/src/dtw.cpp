#include "uwb/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uwb/errors.hpp"

namespace uwb {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

double mddtw_distance(const FeatureSequence& a, const FeatureSequence& b) {
  validate_feature_sequence(a);
  validate_feature_sequence(b);
  if (a.dim != b.dim)
    throw ValidationError("mddtw_distance: dimension mismatch (" + std::to_string(a.dim) +
                          " vs " + std::to_string(b.dim) + ")");

  const std::size_t la = a.length();
  const std::size_t lb = b.length();
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> prev(lb, inf);
  std::vector<double> cur(lb, inf);
  for (std::size_t i = 0; i < la; ++i) {
    for (std::size_t j = 0; j < lb; ++j) {
      const double cost = euclidean(a.step(i), b.step(j));
      double best;
      if (i == 0 && j == 0)
        best = 0.0;
      else if (i == 0)
        best = cur[j - 1];
      else if (j == 0)
        best = prev[j];
      else
        best = std::min({prev[j], cur[j - 1], prev[j - 1]});
      cur[j] = best + cost;
    }
    std::swap(prev, cur);
  }
  return prev[lb - 1];
}

PooledStats pooled_stats(std::span<const FeatureSequence> seqs) {
  if (seqs.empty()) throw ValidationError("pooled_stats: empty collection");
  const std::size_t dim = seqs.front().dim;
  std::size_t count = 0;
  for (const FeatureSequence& s : seqs) {
    validate_feature_sequence(s);
    if (s.dim != dim) throw ValidationError("pooled_stats: sequences disagree on dimension");
    count += s.length();
  }

  PooledStats stats;
  stats.mean.assign(dim, 0.0);
  stats.scale.assign(dim, 1.0);
  for (const FeatureSequence& s : seqs)
    for (std::size_t i = 0; i < s.length(); ++i) {
      const auto step = s.step(i);
      for (std::size_t k = 0; k < dim; ++k) stats.mean[k] += step[k];
    }
  for (std::size_t k = 0; k < dim; ++k) stats.mean[k] /= static_cast<double>(count);

  std::vector<double> var(dim, 0.0);
  for (const FeatureSequence& s : seqs)
    for (std::size_t i = 0; i < s.length(); ++i) {
      const auto step = s.step(i);
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = step[k] - stats.mean[k];
        var[k] += d * d;
      }
    }
  for (std::size_t k = 0; k < dim; ++k) {
    const double sd = std::sqrt(var[k] / static_cast<double>(count));
    stats.scale[k] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

FeatureSequence apply_stats(const FeatureSequence& seq, const PooledStats& stats) {
  if (seq.dim != stats.mean.size())
    throw ValidationError("apply_stats: dimension mismatch");
  FeatureSequence out = seq;
  for (std::size_t i = 0; i < out.length(); ++i)
    for (std::size_t k = 0; k < out.dim; ++k) {
      double& v = out.values[i * out.dim + k];
      v = (v - stats.mean[k]) / stats.scale[k];
    }
  return out;
}

std::vector<FeatureSequence> zscore_per_dim(std::span<const FeatureSequence> seqs) {
  const PooledStats stats = pooled_stats(seqs);
  std::vector<FeatureSequence> out;
  out.reserve(seqs.size());
  for (const FeatureSequence& s : seqs) out.push_back(apply_stats(s, stats));
  return out;
}

StateLabel nn_classify(const FeatureSequence& test, std::span<const LabeledSequence> train) {
  if (train.empty()) throw ValidationError("nn_classify: empty training collection");
  std::size_t best = 0;
  double best_dist = mddtw_distance(test, train[0].seq);
  for (std::size_t i = 1; i < train.size(); ++i) {
    const double d = mddtw_distance(test, train[i].seq);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return train[best].label;
}

}  // namespace uwb
