#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "uwb/types.hpp"

namespace testutil {

// Deterministic uniform/normal draws for test data.
class Rand {
public:
  explicit Rand(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  std::uint64_t index(std::uint64_t n) { return engine_() % n; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

private:
  std::mt19937_64 engine_;
};

inline uwb::Frame constant_frame(double value) {
  uwb::Frame f;
  f.samples.fill(value);
  return f;
}

inline uwb::FrameSet make_frame_set(std::vector<uwb::Frame> frames, const std::string& id = "fs",
                                    std::optional<uwb::StateLabel> label = uwb::StateLabel::Rest) {
  uwb::FrameSet fs;
  fs.frames = std::move(frames);
  fs.id = id;
  fs.label = label;
  return fs;
}

inline uwb::FrameSet random_frame_set(std::size_t t, Rand& rand, const std::string& id = "fs") {
  std::vector<uwb::Frame> frames(t);
  for (uwb::Frame& f : frames)
    for (double& v : f.samples) v = rand.uniform(0.0, 100.0);
  return make_frame_set(std::move(frames), id);
}

inline uwb::FeatureSequence make_sequence(const std::vector<double>& values, std::size_t dim = 1) {
  return uwb::FeatureSequence{values, dim};
}

inline uwb::FeatureSequence random_sequence(std::size_t length, std::size_t dim, Rand& rand,
                                            double lo = -5.0, double hi = 5.0) {
  uwb::FeatureSequence seq;
  seq.dim = dim;
  seq.values.resize(length * dim);
  for (double& v : seq.values) v = rand.uniform(lo, hi);
  return seq;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

#ifdef UWBMC_BIN
inline CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(UWBMC_BIN) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}
#endif

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
