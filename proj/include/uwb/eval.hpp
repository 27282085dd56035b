#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uwb/clean.hpp"
#include "uwb/features.hpp"
#include "uwb/hmm.hpp"
#include "uwb/types.hpp"

namespace uwb {

enum class Method { CleanConventionalDtw, CleanShortTemplateDtw, ProposedGmmHmm };

inline constexpr Method kAllMethods[] = {Method::CleanConventionalDtw,
                                         Method::CleanShortTemplateDtw,
                                         Method::ProposedGmmHmm};

std::string method_name(Method m);          // machine-readable id
std::string method_display_name(Method m);  // table row label

struct FoldRecord {
  std::string id;
  StateLabel truth;
  StateLabel predicted;
};

struct MethodReport {
  Method method;
  std::vector<FoldRecord> folds;
  double accuracy_percent = 0.0;
};

struct EvalReport {
  std::string participant;
  std::vector<MethodReport> methods;
};

struct EvalConfig {
  PulseTemplate pulse = default_template();
  double short_fraction = 0.25;
  std::size_t window = kEnvelopeWindow;
  std::size_t decimation = kDecimationFactor;
  std::size_t n_states = 5;
  TrainConfig train;
};

// Per-fold training membership, for leakage checks.
struct FoldLog {
  struct Fold {
    std::string test_id;
    std::vector<std::string> train_ids;
  };
  std::vector<Fold> folds;
};

double accuracy_percent(std::span<const FoldRecord> folds);

// Leave-one-out cross-validation: every frame set is tested once against
// models/statistics built from the other sets only.
MethodReport loocv(const Dataset& dataset, Method method, const EvalConfig& cfg = {},
                   FoldLog* log = nullptr);

EvalReport benchmark(const Dataset& dataset, std::span<const Method> methods,
                     const EvalConfig& cfg = {});
EvalReport benchmark(const Dataset& dataset, const EvalConfig& cfg = {});

nlohmann::ordered_json to_json(const EvalReport& report);

// Fixed-width text table: one row per method, one column per participant.
std::string render_accuracy_table(std::span<const std::string> row_labels,
                                  std::span<const std::string> col_labels,
                                  const std::vector<std::vector<double>>& accuracies);
std::string render_report(const EvalReport& report);

}  // namespace uwb
