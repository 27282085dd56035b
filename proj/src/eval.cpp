#include "uwb/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "uwb/dtw.hpp"
#include "uwb/errors.hpp"

namespace uwb {

std::string method_name(Method m) {
  switch (m) {
    case Method::CleanConventionalDtw: return "clean_conventional_dtw";
    case Method::CleanShortTemplateDtw: return "clean_short_template_dtw";
    case Method::ProposedGmmHmm: return "proposed_gmm_hmm";
  }
  throw ValidationError("unknown method");
}

std::string method_display_name(Method m) {
  switch (m) {
    case Method::CleanConventionalDtw: return "Conventional CLEAN + MD-DTW";
    case Method::CleanShortTemplateDtw: return "Short-template CLEAN + MD-DTW";
    case Method::ProposedGmmHmm: return "Proposed RMS envelope + GMM-HMM";
  }
  throw ValidationError("unknown method");
}

double accuracy_percent(std::span<const FoldRecord> folds) {
  if (folds.empty()) throw ValidationError("accuracy over zero folds is undefined");
  std::size_t correct = 0;
  for (const FoldRecord& f : folds)
    if (f.truth == f.predicted) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(folds.size());
}

namespace {

std::vector<FeatureSequence> features_for_method(const Dataset& dataset, Method method,
                                                 const EvalConfig& cfg) {
  std::vector<FeatureSequence> feats;
  feats.reserve(dataset.size());
  for (const FrameSet& fs : dataset.frame_sets) {
    switch (method) {
      case Method::ProposedGmmHmm:
        feats.push_back(extract_feature(fs, cfg.window, cfg.decimation));
        break;
      case Method::CleanConventionalDtw:
        feats.push_back(track_targets(fs, cfg.pulse, CleanVariant::conventional()));
        break;
      case Method::CleanShortTemplateDtw:
        feats.push_back(track_targets(fs, cfg.pulse,
                                      CleanVariant::short_template(cfg.short_fraction)));
        break;
    }
  }
  return feats;
}

StateLabel predict_gmm_hmm(std::span<const FeatureSequence> feats,
                           std::span<const StateLabel> labels,
                           std::span<const std::size_t> train, std::size_t test,
                           const EvalConfig& cfg) {
  std::vector<FeatureSequence> rest, move;
  for (std::size_t idx : train)
    (labels[idx] == StateLabel::Rest ? rest : move).push_back(feats[idx]);
  ClassifierModels models;
  const TrainConfig& tc = cfg.train;
  models.rest = baum_welch(init_model(cfg.n_states, rest, tc.variance_floor), rest, tc).model;
  models.move = baum_welch(init_model(cfg.n_states, move, tc.variance_floor), move, tc).model;
  return classify(models, feats[test]);
}

StateLabel predict_dtw_nn(std::span<const FeatureSequence> feats,
                          std::span<const StateLabel> labels,
                          std::span<const std::size_t> train, std::size_t test) {
  // z-normalization moments come from the training fold only
  std::vector<FeatureSequence> train_feats;
  train_feats.reserve(train.size());
  for (std::size_t idx : train) train_feats.push_back(feats[idx]);
  const PooledStats stats = pooled_stats(train_feats);

  std::vector<LabeledSequence> train_set;
  train_set.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    train_set.push_back({apply_stats(train_feats[i], stats), labels[train[i]]});
  return nn_classify(apply_stats(feats[test], stats), train_set);
}

}  // namespace

MethodReport loocv(const Dataset& dataset, Method method, const EvalConfig& cfg, FoldLog* log) {
  validate_dataset(dataset);
  const std::size_t n = dataset.size();
  if (n < 2) throw ValidationError("LOOCV needs at least 2 frame sets");

  std::vector<StateLabel> labels;
  labels.reserve(n);
  for (const FrameSet& fs : dataset.frame_sets) labels.push_back(*fs.label);

  const std::vector<FeatureSequence> feats = features_for_method(dataset, method, cfg);

  MethodReport report;
  report.method = method;
  for (std::size_t test = 0; test < n; ++test) {
    std::vector<std::size_t> train;
    train.reserve(n - 1);
    bool has_rest = false, has_move = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == test) continue;
      train.push_back(i);
      (labels[i] == StateLabel::Rest ? has_rest : has_move) = true;
    }
    const std::string& test_id = dataset.frame_sets[test].id;
    if (!has_rest || !has_move)
      throw ValidationError("LOOCV fold holding out '" + test_id +
                            "' leaves a training fold with only one label");
    if (log) {
      FoldLog::Fold fold;
      fold.test_id = test_id;
      for (std::size_t idx : train) fold.train_ids.push_back(dataset.frame_sets[idx].id);
      log->folds.push_back(std::move(fold));
    }

    const StateLabel pred = method == Method::ProposedGmmHmm
                                ? predict_gmm_hmm(feats, labels, train, test, cfg)
                                : predict_dtw_nn(feats, labels, train, test);
    report.folds.push_back({test_id, labels[test], pred});
  }
  report.accuracy_percent = accuracy_percent(report.folds);
  return report;
}

EvalReport benchmark(const Dataset& dataset, std::span<const Method> methods,
                     const EvalConfig& cfg) {
  EvalReport report;
  report.participant = dataset.manifest.participant;
  for (Method m : methods) report.methods.push_back(loocv(dataset, m, cfg));
  return report;
}

EvalReport benchmark(const Dataset& dataset, const EvalConfig& cfg) {
  return benchmark(dataset, kAllMethods, cfg);
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["participant"] = report.participant;
  j["methods"] = nlohmann::ordered_json::array();
  for (const MethodReport& mr : report.methods) {
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const FoldRecord& f : mr.folds)
      folds.push_back({{"id", f.id},
                       {"true", to_string(f.truth)},
                       {"pred", to_string(f.predicted)}});
    j["methods"].push_back({{"name", method_name(mr.method)},
                            {"folds", std::move(folds)},
                            {"accuracy_percent", mr.accuracy_percent}});
  }
  return j;
}

std::string render_accuracy_table(std::span<const std::string> row_labels,
                                  std::span<const std::string> col_labels,
                                  const std::vector<std::vector<double>>& accuracies) {
  if (row_labels.size() != accuracies.size())
    throw ValidationError("render_accuracy_table: row/value count mismatch");

  std::size_t name_width = std::string("Method").size();
  for (const std::string& r : row_labels) name_width = std::max(name_width, r.size());
  std::vector<std::size_t> col_width(col_labels.size());
  for (std::size_t c = 0; c < col_labels.size(); ++c)
    col_width[c] = std::max<std::size_t>(6, col_labels[c].size());

  std::string out;
  auto pad_right = [&](const std::string& s, std::size_t w) {
    out += s;
    out.append(w - s.size(), ' ');
  };
  auto pad_left = [&](const std::string& s, std::size_t w) {
    out.append(w - s.size(), ' ');
    out += s;
  };

  pad_right("Method", name_width);
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    out += " | ";
    pad_left(col_labels[c], col_width[c]);
  }
  out += '\n';
  out.append(name_width, '-');
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    out += "-+-";
    out.append(col_width[c], '-');
  }
  out += '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    if (accuracies[r].size() != col_labels.size())
      throw ValidationError("render_accuracy_table: column/value count mismatch");
    pad_right(row_labels[r], name_width);
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", accuracies[r][c]);
      out += " | ";
      pad_left(buf, col_width[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_report(const EvalReport& report) {
  std::vector<std::string> rows;
  std::vector<std::vector<double>> values;
  for (const MethodReport& mr : report.methods) {
    rows.push_back(method_display_name(mr.method));
    values.push_back({mr.accuracy_percent});
  }
  const std::vector<std::string> cols = {report.participant};
  return render_accuracy_table(rows, cols, values);
}

}  // namespace uwb
