#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "uwb/errors.hpp"
#include "uwb/hmm.hpp"

using namespace uwb;
using testutil::Rand;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_gauss(double x, double mean, double var) {
  static const double log2pi = std::log(2.0 * 3.14159265358979323846);
  const double d = x - mean;
  return -0.5 * (log2pi + std::log(var) + d * d / var);
}

double step_log_density(const HmmModel& m, std::size_t state, std::span<const double> x) {
  double ll = 0.0;
  for (std::size_t k = 0; k < m.dim; ++k)
    ll += log_gauss(x[k], m.states[state].mean[k], m.states[state].var[k]);
  return ll;
}

// Explicit sum over complete state paths; transitions with zero probability
// prune the branch.
void walk_paths(const HmmModel& m, const FeatureSequence& seq, std::size_t t, std::size_t state,
                double acc, std::vector<double>& path_lls) {
  acc += step_log_density(m, state, seq.step(t));
  if (t + 1 == seq.length()) {
    path_lls.push_back(acc);
    return;
  }
  for (std::size_t next = 0; next < m.n_states; ++next) {
    const double a = m.a(state, next);
    if (a > 0.0) walk_paths(m, seq, t + 1, next, acc + std::log(a), path_lls);
  }
}

double loglik_bruteforce(const HmmModel& m, const FeatureSequence& seq) {
  std::vector<double> path_lls;
  for (std::size_t s = 0; s < m.n_states; ++s)
    if (m.pi[s] > 0.0) walk_paths(m, seq, 0, s, std::log(m.pi[s]), path_lls);
  if (path_lls.empty()) return kNegInf;
  double mx = kNegInf;
  for (double v : path_lls) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : path_lls) sum += std::exp(v - mx);
  return mx + std::log(sum);
}

HmmModel random_left_right_model(std::size_t n_states, std::size_t dim, Rand& rand) {
  HmmModel m;
  m.n_states = n_states;
  m.dim = dim;
  m.pi.assign(n_states, 0.0);
  m.pi[0] = 1.0;
  m.trans.assign(n_states * n_states, 0.0);
  for (std::size_t i = 0; i + 1 < n_states; ++i) {
    const double self = rand.uniform(0.2, 0.8);
    m.a(i, i) = self;
    m.a(i, i + 1) = 1.0 - self;
  }
  m.a(n_states - 1, n_states - 1) = 1.0;
  for (std::size_t i = 0; i < n_states; ++i) {
    GaussianState g;
    for (std::size_t k = 0; k < dim; ++k) {
      g.mean.push_back(rand.uniform(-3.0, 3.0));
      g.var.push_back(rand.uniform(0.1, 4.0));
    }
    m.states.push_back(std::move(g));
  }
  return m;
}

void check_left_right_structure(const HmmModel& m) {
  CHECK(m.pi[0] == 1.0);
  for (std::size_t i = 1; i < m.n_states; ++i) CHECK(m.pi[i] == 0.0);
  for (std::size_t i = 0; i < m.n_states; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.n_states; ++j) {
      if (j != i && j != i + 1) CHECK(m.a(i, j) == 0.0);
      row += m.a(i, j);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(m.a(m.n_states - 1, m.n_states - 1) == 1.0);
}

}  // namespace

TEST_CASE("init_model: one constant sequence gives floored variances") {
  const FeatureSequence seq = testutil::make_sequence(std::vector<double>(10, 4.5));
  const HmmModel m = init_model(5, std::vector<FeatureSequence>{seq});
  for (const GaussianState& g : m.states) {
    CHECK(g.mean[0] == 4.5);
    CHECK(g.var[0] == 1e-6);
  }
  check_left_right_structure(m);
}

TEST_CASE("init_model: single state pools all steps") {
  const FeatureSequence seq = testutil::make_sequence({1.0, 2.0, 3.0, 6.0});
  const HmmModel m = init_model(1, std::vector<FeatureSequence>{seq});
  CHECK(m.states[0].mean[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.states[0].var[0] == doctest::Approx(3.5).epsilon(1e-12));  // population variance
}

TEST_CASE("init_model: segment moments match a direct recomputation") {
  Rand rand(1);
  std::vector<FeatureSequence> seqs;
  for (int i = 0; i < 4; ++i) seqs.push_back(testutil::random_sequence(9 + rand.index(8), 2, rand));
  const std::size_t n_states = 3;
  const HmmModel m = init_model(n_states, seqs);

  for (std::size_t k = 0; k < n_states; ++k) {
    for (std::size_t d = 0; d < 2; ++d) {
      double mean = 0.0;
      std::size_t count = 0;
      for (const FeatureSequence& s : seqs) {
        const std::size_t lo = k * s.length() / n_states;
        const std::size_t hi = (k + 1) * s.length() / n_states;
        for (std::size_t t = lo; t < hi; ++t) {
          mean += s.step(t)[d];
          ++count;
        }
      }
      mean /= static_cast<double>(count);
      double var = 0.0;
      for (const FeatureSequence& s : seqs) {
        const std::size_t lo = k * s.length() / n_states;
        const std::size_t hi = (k + 1) * s.length() / n_states;
        for (std::size_t t = lo; t < hi; ++t)
          var += (s.step(t)[d] - mean) * (s.step(t)[d] - mean);
      }
      var /= static_cast<double>(count);
      CHECK(m.states[k].mean[d] == doctest::Approx(mean).epsilon(1e-12));
      CHECK(m.states[k].var[d] == doctest::Approx(std::max(var, 1e-6)).epsilon(1e-12));
    }
  }
}

TEST_CASE("init_model rejects sequences shorter than the state count") {
  const FeatureSequence seq = testutil::make_sequence({1.0, 2.0, 3.0});
  CHECK_THROWS_WITH_AS(init_model(5, std::vector<FeatureSequence>{seq}),
                       doctest::Contains("sequence 0"), ValidationError);
}

TEST_CASE("log_likelihood: standard normal at zero, one state") {
  HmmModel m;
  m.n_states = 1;
  m.dim = 1;
  m.pi = {1.0};
  m.trans = {1.0};
  m.states = {{{0.0}, {1.0}}};
  const std::size_t steps = 7;
  const FeatureSequence seq = testutil::make_sequence(std::vector<double>(steps, 0.0));
  const double expected = static_cast<double>(steps) * std::log(1.0 / std::sqrt(2.0 * 3.14159265358979323846));
  CHECK(log_likelihood(m, seq) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_likelihood: a length-1 sequence scores state 0 only") {
  Rand rand(2);
  const HmmModel m = random_left_right_model(4, 1, rand);
  const FeatureSequence seq = testutil::make_sequence({0.7});
  const double expected = step_log_density(m, 0, seq.step(0));  // log pi[0] = 0
  CHECK(log_likelihood(m, seq) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("forward algorithm matches brute-force path marginalization") {
  Rand rand(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_states = 1 + rand.index(5);
    const std::size_t dim = 1 + rand.index(2);
    const HmmModel m = random_left_right_model(n_states, dim, rand);
    const FeatureSequence seq = testutil::random_sequence(1 + rand.index(8), dim, rand);
    const double fwd = log_likelihood(m, seq);
    const double ref = loglik_bruteforce(m, seq);
    CHECK(fwd == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("log_likelihood rejects dimension mismatches") {
  Rand rand(4);
  const HmmModel m = random_left_right_model(3, 2, rand);
  CHECK_THROWS_AS(log_likelihood(m, testutil::make_sequence({1.0, 2.0, 3.0}, 1)),
                  ValidationError);
}

TEST_CASE("baum_welch: an already-converged model stops after one extra pass") {
  const FeatureSequence seq = testutil::make_sequence(std::vector<double>(10, 2.0));
  const std::vector<FeatureSequence> seqs = {seq};
  const HmmModel m0 = init_model(5, seqs);
  TrainConfig cfg;
  const TrainResult result = baum_welch(m0, seqs, cfg);
  REQUIRE(result.ll_trace.size() >= 2);
  const double rel = (result.ll_trace[1] - result.ll_trace[0]) /
                     std::max(1.0, std::abs(result.ll_trace[0]));
  CHECK(rel < cfg.ll_tol);
}

TEST_CASE("baum_welch: log-likelihood trace is non-decreasing, structure preserved") {
  Rand rand(5);
  for (int run = 0; run < 50; ++run) {
    const std::size_t n_states = 2 + rand.index(4);
    const std::size_t dim = 1 + rand.index(2);
    std::vector<FeatureSequence> seqs;
    const std::size_t n_seqs = 2 + rand.index(5);
    for (std::size_t s = 0; s < n_seqs; ++s)
      seqs.push_back(testutil::random_sequence(n_states + rand.index(20), dim, rand));

    TrainConfig cfg;
    cfg.max_iters = 25;
    const TrainResult result = baum_welch(init_model(n_states, seqs), seqs, cfg);
    for (std::size_t k = 0; k + 1 < result.ll_trace.size(); ++k)
      CHECK(result.ll_trace[k + 1] >= result.ll_trace[k] - 1e-8);
    check_left_right_structure(result.model);
    for (const GaussianState& g : result.model.states)
      for (double v : g.var) CHECK(v >= cfg.variance_floor);
  }
}

TEST_CASE("baum_welch: single state recovers pooled sample moments") {
  // two clusters, but one state is sufficient: the M-step closed form is the
  // pooled mean/variance
  std::vector<double> values;
  for (int i = 0; i < 10; ++i) values.push_back(-2.0);
  for (int i = 0; i < 10; ++i) values.push_back(6.0);
  const std::vector<FeatureSequence> seqs = {testutil::make_sequence(values)};

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());

  TrainConfig cfg;
  const TrainResult result = baum_welch(init_model(1, seqs), seqs, cfg);
  CHECK(result.model.states[0].mean[0] == doctest::Approx(mean).epsilon(1e-12));
  CHECK(result.model.states[0].var[0] == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("baum_welch rejects an empty training collection") {
  Rand rand(6);
  const HmmModel m = random_left_right_model(3, 1, rand);
  CHECK_THROWS_AS(baum_welch(m, std::vector<FeatureSequence>{}, TrainConfig{}), ValidationError);
}

TEST_CASE("classify: identical models tie to Rest") {
  Rand rand(7);
  const HmmModel m = random_left_right_model(3, 1, rand);
  const ClassifierModels models{m, m};
  CHECK(classify(models, testutil::random_sequence(6, 1, rand)) == StateLabel::Rest);
}

TEST_CASE("classify: sequences from a well-separated model get its label") {
  Rand rand(8);
  HmmModel rest = random_left_right_model(3, 1, rand);
  HmmModel move = rest;
  for (GaussianState& g : rest.states) {
    g.mean[0] = 0.0;
    g.var[0] = 1.0;
  }
  for (GaussianState& g : move.states) {
    g.mean[0] = 20.0;  // 20 sigma apart
    g.var[0] = 1.0;
  }
  const ClassifierModels models{rest, move};

  for (int trial = 0; trial < 20; ++trial) {
    FeatureSequence seq;
    seq.dim = 1;
    const bool from_move = trial % 2 == 0;
    for (int t = 0; t < 12; ++t)
      seq.values.push_back((from_move ? 20.0 : 0.0) + rand.normal());
    CHECK(classify(models, seq) == (from_move ? StateLabel::Move : StateLabel::Rest));
  }
}

TEST_CASE("model JSON serialization round-trips every parameter") {
  Rand rand(9);
  const HmmModel m = random_left_right_model(5, 2, rand);
  const HmmModel back = hmm_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(back.n_states == m.n_states);
  CHECK(back.dim == m.dim);
  CHECK(back.pi == m.pi);
  CHECK(back.trans == m.trans);
  for (std::size_t i = 0; i < m.n_states; ++i) {
    CHECK(back.states[i].mean == m.states[i].mean);
    CHECK(back.states[i].var == m.states[i].var);
  }
}

TEST_CASE("train_classifier handles one sequence per class") {
  Rand rand(11);
  Dataset d;
  d.manifest.participant = "p";
  FrameSet rest = testutil::random_frame_set(20, rand, "r0");
  rest.label = StateLabel::Rest;
  FrameSet move = testutil::random_frame_set(20, rand, "m0");
  move.label = StateLabel::Move;
  d.frame_sets.push_back(std::move(rest));
  d.frame_sets.push_back(std::move(move));

  const auto extractor = [](const FrameSet& fs) {
    FeatureSequence s;
    s.dim = 1;
    for (std::size_t t = 0; t < fs.frame_count(); ++t) s.values.push_back(fs.frames[t].samples[0]);
    return s;
  };
  const ClassifierModels models = train_classifier(d, extractor, TrainConfig{});
  CHECK(models.rest.n_states == 5);
  CHECK(models.move.n_states == 5);
}

TEST_CASE("train_classifier is deterministic and needs both labels") {
  Rand rand(10);
  Dataset d;
  d.manifest.participant = "p";
  for (int i = 0; i < 3; ++i) {
    FrameSet fs = testutil::random_frame_set(24, rand, "r" + std::to_string(i));
    fs.label = StateLabel::Rest;
    d.frame_sets.push_back(std::move(fs));
  }
  SUBCASE("missing Move label") {
    const auto extractor = [](const FrameSet& fs) {
      FeatureSequence s;
      s.dim = 1;
      for (std::size_t t = 0; t < fs.frame_count(); ++t)
        s.values.push_back(fs.frames[t].samples[0]);
      return s;
    };
    CHECK_THROWS_AS(train_classifier(d, extractor, TrainConfig{}), ValidationError);
  }
  SUBCASE("deterministic training") {
    for (int i = 0; i < 3; ++i) {
      FrameSet fs = testutil::random_frame_set(24, rand, "m" + std::to_string(i));
      fs.label = StateLabel::Move;
      d.frame_sets.push_back(std::move(fs));
    }
    const auto extractor = [](const FrameSet& fs) {
      FeatureSequence s;
      s.dim = 1;
      for (std::size_t t = 0; t < fs.frame_count(); ++t)
        s.values.push_back(fs.frames[t].samples[3]);
      return s;
    };
    const ClassifierModels a = train_classifier(d, extractor, TrainConfig{});
    const ClassifierModels b = train_classifier(d, extractor, TrainConfig{});
    CHECK(to_json(a.rest).dump() == to_json(b.rest).dump());
    CHECK(to_json(a.move).dump() == to_json(b.move).dump());
  }
}
