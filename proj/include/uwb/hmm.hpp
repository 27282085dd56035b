#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uwb/types.hpp"

namespace uwb {

// Left-to-right HMM with one diagonal Gaussian per state: transitions allow
// only self-loop and single-step advance, the start is pinned to state 0 and
// the last state self-loops with probability 1.
struct GaussianState {
  std::vector<double> mean;
  std::vector<double> var;
};

struct HmmModel {
  std::size_t n_states = 5;
  std::size_t dim = 1;
  std::vector<double> pi;     // (1, 0, ..., 0)
  std::vector<double> trans;  // n_states x n_states, row-major, banded
  std::vector<GaussianState> states;

  double a(std::size_t i, std::size_t j) const { return trans[i * n_states + j]; }
  double& a(std::size_t i, std::size_t j) { return trans[i * n_states + j]; }
};

struct TrainConfig {
  std::size_t max_iters = 100;
  double ll_tol = 1e-6;         // relative total-log-likelihood improvement
  double variance_floor = 1e-6;
  std::uint64_t seed = 0;  // reserved; initialization is deterministic
};

// Uniform-segmentation initialization: state k's Gaussian gets the pooled
// moments of the k-th equal segment of every training sequence.
HmmModel init_model(std::size_t n_states, std::span<const FeatureSequence> seqs,
                    double variance_floor = 1e-6);

// log p(seq | m) by the forward algorithm, computed in log space.
double log_likelihood(const HmmModel& m, const FeatureSequence& seq);

struct TrainResult {
  HmmModel model;
  std::vector<double> ll_trace;  // total log-likelihood per EM iteration
};

// Multi-sequence Baum-Welch. The left-to-right zero pattern of the
// transition matrix and the support of pi are preserved exactly; variances
// are floored every M-step.
TrainResult baum_welch(const HmmModel& m0, std::span<const FeatureSequence> seqs,
                       const TrainConfig& cfg);

struct ClassifierModels {
  HmmModel rest;
  HmmModel move;
};

using FeatureExtractor = std::function<FeatureSequence(const FrameSet&)>;

// One model per state label, trained independently on that label's features.
ClassifierModels train_classifier(const Dataset& dataset, const FeatureExtractor& extractor,
                                  const TrainConfig& cfg, std::size_t n_states = 5);

// Maximum-likelihood decision; an exact tie classifies as Rest.
StateLabel classify(const ClassifierModels& models, const FeatureSequence& seq);

nlohmann::ordered_json to_json(const HmmModel& m);
HmmModel hmm_from_json(const nlohmann::json& j);

}  // namespace uwb
