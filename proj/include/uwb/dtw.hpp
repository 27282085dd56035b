#pragma once

#include <span>
#include <vector>

#include "uwb/types.hpp"

namespace uwb {

// Classic unit-weight DTW over the Euclidean local cost, moves
// (i-1,j), (i,j-1), (i-1,j-1), path anchored at both ends. Returns the raw
// (unnormalized) minimal cumulative cost.
double mddtw_distance(const FeatureSequence& a, const FeatureSequence& b);

// Pooled per-dimension moments over all steps of all sequences. Dimensions
// with zero variance keep scale 1 so they pass through unscaled.
struct PooledStats {
  std::vector<double> mean;
  std::vector<double> scale;
};

PooledStats pooled_stats(std::span<const FeatureSequence> seqs);
FeatureSequence apply_stats(const FeatureSequence& seq, const PooledStats& stats);
std::vector<FeatureSequence> zscore_per_dim(std::span<const FeatureSequence> seqs);

struct LabeledSequence {
  FeatureSequence seq;
  StateLabel label;
};

// 1-nearest-neighbor under mddtw_distance; ties go to the earliest
// training index.
StateLabel nn_classify(const FeatureSequence& test, std::span<const LabeledSequence> train);

}  // namespace uwb
