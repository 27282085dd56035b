#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uwb/dataset.hpp"
#include "uwb/dtw.hpp"
#include "uwb/errors.hpp"
#include "uwb/eval.hpp"
#include "uwb/features.hpp"
#include "uwb/hmm.hpp"
#include "uwb/sim.hpp"

namespace {

namespace fs = std::filesystem;

void append_value(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_text_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw uwb::IoError("cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw uwb::IoError("write failed for " + path.string());
}

struct SimulateOpts {
  std::string out;
  std::size_t per_state = 20;
  double fps = 200.0;
  std::uint64_t seed = 0;
  double noise = 1.0;
  double min_seconds = 1.5;
  double max_seconds = 2.5;
  double target_amp = 30.0;
  std::size_t rest_delay = 80;
  std::size_t extent = 60;
  std::string participant = "synthetic";
};

void run_simulate(const SimulateOpts& opt) {
  uwb::SimConfig cfg = uwb::default_sim_config(opt.seed);
  cfg.fps = opt.fps;
  cfg.noise_sigma = opt.noise;
  cfg.target_amp = opt.target_amp;
  cfg.target_rest_delay = opt.rest_delay;
  cfg.move_extent = opt.extent;

  const std::size_t t_min = uwb::frames_for_duration(opt.fps, opt.min_seconds);
  const std::size_t t_max = uwb::frames_for_duration(opt.fps, opt.max_seconds);
  const uwb::Dataset dataset =
      uwb::generate_dataset(cfg, opt.per_state, t_min, t_max, opt.participant);
  uwb::write_dataset(dataset, opt.out);

  std::size_t rest = 0;
  for (const uwb::FrameSet& fs : dataset.frame_sets)
    if (*fs.label == uwb::StateLabel::Rest) ++rest;
  std::cout << "wrote " << dataset.size() << " frame sets (" << rest << " Rest / "
            << dataset.size() - rest << " Move) to " << opt.out << " (seed " << opt.seed << ")\n";
}

struct ExtractOpts {
  std::string data;
  std::string out;
  std::string method = "proposed";
  std::size_t window = uwb::kEnvelopeWindow;
  std::size_t decimation = uwb::kDecimationFactor;
  std::size_t template_len = 31;
  double short_fraction = 0.25;
};

void run_extract(const ExtractOpts& opt) {
  const uwb::Dataset dataset = uwb::read_dataset(opt.data);
  std::error_code ec;
  fs::create_directories(opt.out, ec);
  if (ec) throw uwb::IoError("cannot create directory " + opt.out + ": " + ec.message());

  const uwb::PulseTemplate tpl = uwb::default_template(opt.template_len);
  for (const uwb::FrameSet& set : dataset.frame_sets) {
    std::string body;
    if (opt.method == "proposed") {
      const uwb::FeatureSequence f = uwb::extract_feature(set, opt.window, opt.decimation);
      for (double v : f.values) {
        append_value(body, v);
        body.push_back('\n');
      }
    } else {
      const uwb::CleanVariant variant =
          opt.method == "clean-conv" ? uwb::CleanVariant::conventional()
                                     : uwb::CleanVariant::short_template(opt.short_fraction);
      const uwb::FeatureSequence track = uwb::track_targets(set, tpl, variant);
      for (std::size_t i = 0; i < track.length(); ++i) {
        const auto step = track.step(i);
        append_value(body, step[0]);
        body.push_back(',');
        append_value(body, step[1]);
        body.push_back('\n');
      }
    }
    write_text_file(fs::path(opt.out) / (set.id + ".csv"), body);
  }
  std::cout << "wrote " << dataset.size() << " feature files to " << opt.out << "\n";
}

struct TrainOpts {
  std::string data;
  std::string out;
  std::size_t states = 5;
  std::size_t max_iters = 100;
  double tol = 1e-6;
  double var_floor = 1e-6;
  std::size_t window = uwb::kEnvelopeWindow;
  std::size_t decimation = uwb::kDecimationFactor;
};

void run_train(const TrainOpts& opt) {
  const uwb::Dataset dataset = uwb::read_dataset(opt.data);
  uwb::TrainConfig cfg;
  cfg.max_iters = opt.max_iters;
  cfg.ll_tol = opt.tol;
  cfg.variance_floor = opt.var_floor;

  const auto extractor = [&](const uwb::FrameSet& fs) {
    return uwb::extract_feature(fs, opt.window, opt.decimation);
  };
  const uwb::ClassifierModels models =
      uwb::train_classifier(dataset, extractor, cfg, opt.states);

  nlohmann::ordered_json j;
  j["format"] = "uwbmc-models";
  j["feature"] = {{"window", opt.window}, {"decimation", opt.decimation}};
  j["rest"] = uwb::to_json(models.rest);
  j["move"] = uwb::to_json(models.move);
  write_text_file(opt.out, j.dump(2) + "\n");
  std::cout << "trained models on " << dataset.size() << " frame sets -> " << opt.out << "\n";
}

struct ClassifyOpts {
  std::string model;
  std::string data;
};

void run_classify(const ClassifyOpts& opt) {
  std::ifstream in(opt.model, std::ios::binary);
  if (!in) throw uwb::IoError("cannot open model file " + opt.model);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw uwb::IoError(opt.model + ": invalid JSON: " + e.what());
  }
  if (!j.contains("rest") || !j.contains("move"))
    throw uwb::ValidationError(opt.model + ": expected 'rest' and 'move' models");
  uwb::ClassifierModels models{uwb::hmm_from_json(j["rest"]), uwb::hmm_from_json(j["move"])};
  std::size_t window = uwb::kEnvelopeWindow;
  std::size_t decimation = uwb::kDecimationFactor;
  if (j.contains("feature")) {
    window = j["feature"].value("window", window);
    decimation = j["feature"].value("decimation", decimation);
  }

  const uwb::Dataset dataset = uwb::read_dataset(opt.data);
  for (const uwb::FrameSet& set : dataset.frame_sets) {
    const uwb::FeatureSequence f = uwb::extract_feature(set, window, decimation);
    if (f.dim != models.rest.dim)
      throw uwb::ValidationError("feature dimension " + std::to_string(f.dim) +
                                 " does not match model dimension " +
                                 std::to_string(models.rest.dim));
    std::cout << set.id << " " << uwb::to_string(uwb::classify(models, f)) << "\n";
  }
}

struct BenchmarkOpts {
  std::string data;
  std::string json_out;
  std::vector<std::string> methods = {"clean-conv", "clean-short", "proposed"};
  std::size_t states = 5;
  std::size_t max_iters = 100;
  double tol = 1e-6;
  double var_floor = 1e-6;
  std::size_t window = uwb::kEnvelopeWindow;
  std::size_t decimation = uwb::kDecimationFactor;
  std::size_t template_len = 31;
  double short_fraction = 0.25;
};

void run_benchmark(const BenchmarkOpts& opt) {
  const uwb::Dataset dataset = uwb::read_dataset(opt.data);

  uwb::EvalConfig cfg;
  cfg.pulse = uwb::default_template(opt.template_len);
  cfg.short_fraction = opt.short_fraction;
  cfg.window = opt.window;
  cfg.decimation = opt.decimation;
  cfg.n_states = opt.states;
  cfg.train.max_iters = opt.max_iters;
  cfg.train.ll_tol = opt.tol;
  cfg.train.variance_floor = opt.var_floor;

  std::vector<uwb::Method> methods;
  for (const std::string& name : opt.methods) {
    if (name == "clean-conv")
      methods.push_back(uwb::Method::CleanConventionalDtw);
    else if (name == "clean-short")
      methods.push_back(uwb::Method::CleanShortTemplateDtw);
    else
      methods.push_back(uwb::Method::ProposedGmmHmm);
  }

  const uwb::EvalReport report = uwb::benchmark(dataset, methods, cfg);
  std::cout << uwb::render_report(report);
  if (!opt.json_out.empty()) write_text_file(opt.json_out, uwb::to_json(report).dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IR-UWB radar motion classification pipeline"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic labeled dataset");
  simulate->add_option("--out", sim.out, "output dataset directory")->required();
  simulate->add_option("--per-state", sim.per_state, "frame sets per state label")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--fps", sim.fps, "capture rate, frames/second")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "master RNG seed")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "additive noise sigma")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--min-seconds", sim.min_seconds, "shortest recording duration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--max-seconds", sim.max_seconds, "longest recording duration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--target-amp", sim.target_amp, "reflector peak amplitude")
      ->capture_default_str();
  simulate->add_option("--rest-delay", sim.rest_delay, "reflector fast-time index at rest")
      ->capture_default_str();
  simulate->add_option("--extent", sim.extent, "movement delay excursion, bins")
      ->capture_default_str();
  simulate->add_option("--participant", sim.participant, "participant id for the manifest")
      ->capture_default_str();
  simulate->callback([&] { run_simulate(sim); });

  ExtractOpts ext;
  CLI::App* extract = app.add_subcommand("extract", "export per-frame-set feature CSVs");
  extract->add_option("--data", ext.data, "dataset directory")->required();
  extract->add_option("--out", ext.out, "output directory")->required();
  extract->add_option("--method", ext.method, "feature method")
      ->check(CLI::IsMember({"proposed", "clean-conv", "clean-short"}))
      ->capture_default_str();
  extract->add_option("--window", ext.window, "RMS window length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_option("--decimation", ext.decimation, "envelope decimation factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  extract->add_option("--template-len", ext.template_len, "CLEAN pulse template length")
      ->capture_default_str();
  extract->add_option("--short-fraction", ext.short_fraction,
                      "central tap fraction for the short template")
      ->capture_default_str();
  extract->callback([&] { run_extract(ext); });

  TrainOpts trn;
  CLI::App* train = app.add_subcommand("train", "train the two-model GMM-HMM classifier");
  train->add_option("--data", trn.data, "labeled dataset directory")->required();
  train->add_option("--out", trn.out, "output model JSON path")->required();
  train->add_option("--states", trn.states, "HMM state count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--max-iters", trn.max_iters, "EM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--tol", trn.tol, "relative log-likelihood stop tolerance")
      ->capture_default_str();
  train->add_option("--var-floor", trn.var_floor, "minimum emission variance")
      ->capture_default_str();
  train->add_option("--window", trn.window, "RMS window length")->capture_default_str();
  train->add_option("--decimation", trn.decimation, "envelope decimation factor")
      ->capture_default_str();
  train->callback([&] { run_train(trn); });

  ClassifyOpts cls;
  CLI::App* classify = app.add_subcommand("classify", "label frame sets with trained models");
  classify->add_option("--model", cls.model, "model JSON from 'train'")->required();
  classify->add_option("--data", cls.data, "dataset directory")->required();
  classify->callback([&] { run_classify(cls); });

  BenchmarkOpts bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "LOOCV accuracy for each method");
  benchmark->add_option("--data", bench.data, "labeled dataset directory")->required();
  benchmark->add_option("--json", bench.json_out, "write machine-readable report here");
  benchmark
      ->add_option("--methods", bench.methods,
                   "subset of methods (proposed, clean-conv, clean-short)")
      ->delimiter(',')
      ->check(CLI::IsMember({"proposed", "clean-conv", "clean-short"}));
  benchmark->add_option("--states", bench.states, "HMM state count")->capture_default_str();
  benchmark->add_option("--max-iters", bench.max_iters, "EM iteration cap")
      ->capture_default_str();
  benchmark->add_option("--tol", bench.tol, "relative log-likelihood stop tolerance")
      ->capture_default_str();
  benchmark->add_option("--var-floor", bench.var_floor, "minimum emission variance")
      ->capture_default_str();
  benchmark->add_option("--window", bench.window, "RMS window length")->capture_default_str();
  benchmark->add_option("--decimation", bench.decimation, "envelope decimation factor")
      ->capture_default_str();
  benchmark->add_option("--template-len", bench.template_len, "CLEAN pulse template length")
      ->capture_default_str();
  benchmark->add_option("--short-fraction", bench.short_fraction,
                        "central tap fraction for the short template")
      ->capture_default_str();
  benchmark->callback([&] { run_benchmark(bench); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
