#include "uwb/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uwb/errors.hpp"

namespace uwb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void validate_model(const HmmModel& m) {
  if (m.n_states == 0) throw ValidationError("model must have at least one state");
  if (m.dim == 0) throw ValidationError("model dimension must be >= 1");
  if (m.pi.size() != m.n_states || m.trans.size() != m.n_states * m.n_states ||
      m.states.size() != m.n_states)
    throw ValidationError("model parameter shapes are inconsistent");
  if (std::abs(m.pi[0] - 1.0) > 1e-9)
    throw ValidationError("left-to-right model must start in state 0");
  for (std::size_t i = 1; i < m.n_states; ++i)
    if (m.pi[i] != 0.0) throw ValidationError("pi must be zero outside state 0");
  for (std::size_t i = 0; i < m.n_states; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.n_states; ++j) {
      if (j != i && j != i + 1 && m.a(i, j) != 0.0)
        throw ValidationError("transition matrix is not left-to-right banded");
      row += m.a(i, j);
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw ValidationError("transition row " + std::to_string(i) + " does not sum to 1");
  }
  for (const GaussianState& s : m.states) {
    if (s.mean.size() != m.dim || s.var.size() != m.dim)
      throw ValidationError("emission parameter shapes are inconsistent");
    for (double v : s.var)
      if (!(v > 0.0)) throw ValidationError("emission variances must be positive");
  }
}

// log N(x; mean, diag var) for one step
double log_emission(const HmmModel& m, std::size_t state, std::span<const double> x) {
  const GaussianState& g = m.states[state];
  double ll = 0.0;
  for (std::size_t k = 0; k < m.dim; ++k) {
    const double d = x[k] - g.mean[k];
    ll += -0.5 * (kLog2Pi + std::log(g.var[k]) + d * d / g.var[k]);
  }
  return ll;
}

// Emission log-densities for a whole sequence, L x n.
std::vector<double> emission_table(const HmmModel& m, const FeatureSequence& seq) {
  const std::size_t l = seq.length();
  std::vector<double> logb(l * m.n_states);
  for (std::size_t t = 0; t < l; ++t)
    for (std::size_t i = 0; i < m.n_states; ++i)
      logb[t * m.n_states + i] = log_emission(m, i, seq.step(t));
  return logb;
}

double log_or_neg_inf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Forward pass over the left-to-right band; returns log alpha (L x n).
std::vector<double> forward(const HmmModel& m, const std::vector<double>& logb, std::size_t l) {
  const std::size_t n = m.n_states;
  std::vector<double> alpha(l * n, kNegInf);
  for (std::size_t i = 0; i < n; ++i)
    alpha[i] = log_or_neg_inf(m.pi[i]) + logb[i];
  for (std::size_t t = 1; t < l; ++t)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = alpha[(t - 1) * n + j] + log_or_neg_inf(m.a(j, j));
      if (j > 0)
        acc = log_sum_exp(acc, alpha[(t - 1) * n + j - 1] + log_or_neg_inf(m.a(j - 1, j)));
      alpha[t * n + j] = acc + logb[t * n + j];
    }
  return alpha;
}

// Backward pass; returns log beta (L x n).
std::vector<double> backward(const HmmModel& m, const std::vector<double>& logb, std::size_t l) {
  const std::size_t n = m.n_states;
  std::vector<double> beta(l * n, kNegInf);
  for (std::size_t i = 0; i < n; ++i) beta[(l - 1) * n + i] = 0.0;
  for (std::size_t t = l - 1; t-- > 0;)
    for (std::size_t i = 0; i < n; ++i) {
      double acc = log_or_neg_inf(m.a(i, i)) + logb[(t + 1) * n + i] + beta[(t + 1) * n + i];
      if (i + 1 < n)
        acc = log_sum_exp(acc, log_or_neg_inf(m.a(i, i + 1)) + logb[(t + 1) * n + i + 1] +
                                   beta[(t + 1) * n + i + 1]);
      beta[t * n + i] = acc;
    }
  return beta;
}

double sequence_log_likelihood(const HmmModel& m, const std::vector<double>& alpha,
                               std::size_t l) {
  const std::size_t n = m.n_states;
  double ll = kNegInf;
  for (std::size_t i = 0; i < n; ++i) ll = log_sum_exp(ll, alpha[(l - 1) * n + i]);
  return ll;
}

}  // namespace

HmmModel init_model(std::size_t n_states, std::span<const FeatureSequence> seqs,
                    double variance_floor) {
  if (n_states == 0) throw ValidationError("init_model: n_states must be >= 1");
  if (seqs.empty()) throw ValidationError("init_model: empty training collection");
  const std::size_t dim = seqs.front().dim;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    validate_feature_sequence(seqs[s]);
    if (seqs[s].dim != dim)
      throw ValidationError("init_model: sequence " + std::to_string(s) +
                            " disagrees on dimension");
    if (seqs[s].length() < n_states)
      throw ValidationError("init_model: sequence " + std::to_string(s) + " has length " +
                            std::to_string(seqs[s].length()) + " < " +
                            std::to_string(n_states) + " states");
  }

  HmmModel m;
  m.n_states = n_states;
  m.dim = dim;
  m.pi.assign(n_states, 0.0);
  m.pi[0] = 1.0;
  m.trans.assign(n_states * n_states, 0.0);
  for (std::size_t i = 0; i + 1 < n_states; ++i) {
    m.a(i, i) = 0.5;
    m.a(i, i + 1) = 0.5;
  }
  m.a(n_states - 1, n_states - 1) = 1.0;

  m.states.assign(n_states, GaussianState{std::vector<double>(dim, 0.0),
                                          std::vector<double>(dim, 0.0)});
  for (std::size_t k = 0; k < n_states; ++k) {
    GaussianState& g = m.states[k];
    std::size_t count = 0;
    for (const FeatureSequence& seq : seqs) {
      const std::size_t l = seq.length();
      const std::size_t lo = k * l / n_states;
      const std::size_t hi = (k + 1) * l / n_states;
      for (std::size_t t = lo; t < hi; ++t) {
        const auto x = seq.step(t);
        for (std::size_t d = 0; d < dim; ++d) g.mean[d] += x[d];
        ++count;
      }
    }
    for (std::size_t d = 0; d < dim; ++d) g.mean[d] /= static_cast<double>(count);
    for (const FeatureSequence& seq : seqs) {
      const std::size_t l = seq.length();
      const std::size_t lo = k * l / n_states;
      const std::size_t hi = (k + 1) * l / n_states;
      for (std::size_t t = lo; t < hi; ++t) {
        const auto x = seq.step(t);
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = x[d] - g.mean[d];
          g.var[d] += diff * diff;
        }
      }
    }
    for (std::size_t d = 0; d < dim; ++d)
      g.var[d] = std::max(g.var[d] / static_cast<double>(count), variance_floor);
  }
  return m;
}

double log_likelihood(const HmmModel& m, const FeatureSequence& seq) {
  validate_model(m);
  validate_feature_sequence(seq);
  if (seq.dim != m.dim)
    throw ValidationError("log_likelihood: sequence dimension " + std::to_string(seq.dim) +
                          " does not match model dimension " + std::to_string(m.dim));
  const std::size_t l = seq.length();
  const std::vector<double> logb = emission_table(m, seq);
  const std::vector<double> alpha = forward(m, logb, l);
  return sequence_log_likelihood(m, alpha, l);
}

TrainResult baum_welch(const HmmModel& m0, std::span<const FeatureSequence> seqs,
                       const TrainConfig& cfg) {
  validate_model(m0);
  if (seqs.empty()) throw ValidationError("baum_welch: empty training collection");
  for (const FeatureSequence& s : seqs) {
    validate_feature_sequence(s);
    if (s.dim != m0.dim) throw ValidationError("baum_welch: sequence/model dimension mismatch");
  }
  if (cfg.max_iters < 1) throw ValidationError("baum_welch: max_iters must be >= 1");
  if (!(cfg.ll_tol > 0.0)) throw ValidationError("baum_welch: ll_tol must be > 0");

  const std::size_t n = m0.n_states;
  const std::size_t dim = m0.dim;
  HmmModel model = m0;
  TrainResult result;

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    // E step: accumulate state occupancies and banded transition counts
    double total_ll = 0.0;
    std::vector<std::vector<double>> gammas(seqs.size());
    std::vector<double> trans_num(n * n, 0.0);  // only band entries ever touched
    std::vector<double> trans_den(n, 0.0);

    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const FeatureSequence& seq = seqs[s];
      const std::size_t l = seq.length();
      const std::vector<double> logb = emission_table(model, seq);
      const std::vector<double> alpha = forward(model, logb, l);
      const std::vector<double> beta = backward(model, logb, l);
      const double ll = sequence_log_likelihood(model, alpha, l);
      total_ll += ll;

      std::vector<double>& gamma = gammas[s];
      gamma.assign(l * n, 0.0);
      for (std::size_t t = 0; t < l; ++t)
        for (std::size_t i = 0; i < n; ++i) {
          const double lg = alpha[t * n + i] + beta[t * n + i] - ll;
          gamma[t * n + i] = lg == kNegInf ? 0.0 : std::exp(lg);
        }

      for (std::size_t t = 0; t + 1 < l; ++t)
        for (std::size_t i = 0; i < n; ++i) {
          if (alpha[t * n + i] == kNegInf) continue;
          for (std::size_t j = i; j < std::min(i + 2, n); ++j) {
            const double a_ij = model.a(i, j);
            if (a_ij <= 0.0) continue;
            const double lxi = alpha[t * n + i] + std::log(a_ij) + logb[(t + 1) * n + j] +
                               beta[(t + 1) * n + j] - ll;
            const double xi = lxi == kNegInf ? 0.0 : std::exp(lxi);
            trans_num[i * n + j] += xi;
            trans_den[i] += xi;
          }
        }
    }

    result.ll_trace.push_back(total_ll);
    if (iter > 0) {
      const double prev = result.ll_trace[iter - 1];
      const double rel = (total_ll - prev) / std::max(1.0, std::abs(prev));
      if (rel < cfg.ll_tol) break;
    }

    // M step: transitions on the band only; zeros stay zero
    for (std::size_t i = 0; i < n; ++i) {
      if (trans_den[i] <= 0.0) continue;  // state saw no transitions; keep row
      if (i + 1 < n) {
        const double self = trans_num[i * n + i] / trans_den[i];
        const double advance = trans_num[i * n + i + 1] / trans_den[i];
        const double norm = self + advance;
        if (norm > 0.0) {
          model.a(i, i) = self / norm;
          model.a(i, i + 1) = advance / norm;
        }
      }
      // last state keeps self-loop probability 1
    }
    model.pi.assign(n, 0.0);
    model.pi[0] = 1.0;

    // emissions: occupancy-weighted means, then variances about the new means
    std::vector<double> occ(n, 0.0);
    std::vector<std::vector<double>> mean_acc(n, std::vector<double>(dim, 0.0));
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const FeatureSequence& seq = seqs[s];
      for (std::size_t t = 0; t < seq.length(); ++t) {
        const auto x = seq.step(t);
        for (std::size_t i = 0; i < n; ++i) {
          const double g = gammas[s][t * n + i];
          if (g == 0.0) continue;
          occ[i] += g;
          for (std::size_t d = 0; d < dim; ++d) mean_acc[i][d] += g * x[d];
        }
      }
    }
    std::vector<std::vector<double>> var_acc(n, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> new_mean(n, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      if (occ[i] <= 0.0) {
        new_mean[i] = model.states[i].mean;  // unvisited state keeps its parameters
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) new_mean[i][d] = mean_acc[i][d] / occ[i];
    }
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const FeatureSequence& seq = seqs[s];
      for (std::size_t t = 0; t < seq.length(); ++t) {
        const auto x = seq.step(t);
        for (std::size_t i = 0; i < n; ++i) {
          const double g = gammas[s][t * n + i];
          if (g == 0.0) continue;
          for (std::size_t d = 0; d < dim; ++d) {
            const double diff = x[d] - new_mean[i][d];
            var_acc[i][d] += g * diff * diff;
          }
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (occ[i] <= 0.0) continue;
      model.states[i].mean = new_mean[i];
      for (std::size_t d = 0; d < dim; ++d)
        model.states[i].var[d] = std::max(var_acc[i][d] / occ[i], cfg.variance_floor);
    }
  }

  result.model = std::move(model);
  return result;
}

ClassifierModels train_classifier(const Dataset& dataset, const FeatureExtractor& extractor,
                                  const TrainConfig& cfg, std::size_t n_states) {
  validate_dataset(dataset);
  std::vector<FeatureSequence> rest_feats;
  std::vector<FeatureSequence> move_feats;
  for (const FrameSet& fs : dataset.frame_sets) {
    if (*fs.label == StateLabel::Rest)
      rest_feats.push_back(extractor(fs));
    else
      move_feats.push_back(extractor(fs));
  }
  if (rest_feats.empty()) throw ValidationError("training data has no Rest frame sets");
  if (move_feats.empty()) throw ValidationError("training data has no Move frame sets");

  ClassifierModels models;
  models.rest = baum_welch(init_model(n_states, rest_feats, cfg.variance_floor), rest_feats, cfg)
                    .model;
  models.move = baum_welch(init_model(n_states, move_feats, cfg.variance_floor), move_feats, cfg)
                    .model;
  return models;
}

StateLabel classify(const ClassifierModels& models, const FeatureSequence& seq) {
  const double ll_rest = log_likelihood(models.rest, seq);
  const double ll_move = log_likelihood(models.move, seq);
  return ll_move > ll_rest ? StateLabel::Move : StateLabel::Rest;
}

nlohmann::ordered_json to_json(const HmmModel& m) {
  nlohmann::ordered_json j;
  j["n_states"] = m.n_states;
  j["dim"] = m.dim;
  j["pi"] = m.pi;
  j["trans"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.n_states; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < m.n_states; ++k) row.push_back(m.a(i, k));
    j["trans"].push_back(std::move(row));
  }
  j["states"] = nlohmann::ordered_json::array();
  for (const GaussianState& g : m.states)
    j["states"].push_back({{"mean", g.mean}, {"var", g.var}});
  return j;
}

HmmModel hmm_from_json(const nlohmann::json& j) {
  HmmModel m;
  try {
    m.n_states = j.at("n_states").get<std::size_t>();
    m.dim = j.at("dim").get<std::size_t>();
    m.pi = j.at("pi").get<std::vector<double>>();
    m.trans.reserve(m.n_states * m.n_states);
    for (const auto& row : j.at("trans"))
      for (const auto& v : row) m.trans.push_back(v.get<double>());
    for (const auto& s : j.at("states"))
      m.states.push_back({s.at("mean").get<std::vector<double>>(),
                          s.at("var").get<std::vector<double>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid model JSON: ") + e.what());
  }
  validate_model(m);
  return m;
}

}  // namespace uwb
