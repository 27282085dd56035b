#include "uwb/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uwb/errors.hpp"

namespace uwb {

namespace {

void append_amplitude(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double parse_amplitude(std::string_view field, const std::string& file, std::size_t row,
                       std::size_t col) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ValidationError(file + ": row " + std::to_string(row) + ", column " +
                          std::to_string(col) + ": unparseable value '" + std::string(field) + "'");
  if (!std::isfinite(v))
    throw ValidationError(file + ": row " + std::to_string(row) + ", column " +
                          std::to_string(col) + ": non-finite value");
  if (v < kAmplitudeMin || v > kAmplitudeMax)
    throw ValidationError(file + ": row " + std::to_string(row) + ", column " +
                          std::to_string(col) + ": value out of [0,100]");
  return v;
}

std::string csv_filename(const std::string& id) { return id + ".csv"; }

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  validate_dataset(dataset);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["participant"] = dataset.manifest.participant;
  if (dataset.manifest.seed.has_value())
    manifest["seed"] = *dataset.manifest.seed;
  else
    manifest["seed"] = nullptr;
  manifest["frame_sets"] = nlohmann::ordered_json::array();

  for (const FrameSet& fs : dataset.frame_sets) {
    const std::string file = csv_filename(fs.id);
    manifest["frame_sets"].push_back({{"id", fs.id},
                                      {"file", file},
                                      {"label", to_string(*fs.label)},
                                      {"fps", fs.fps}});

    std::string body;
    body.reserve(fs.frames.size() * kFastTimeBins * 8);
    for (const Frame& frame : fs.frames) {
      for (std::size_t j = 0; j < kFastTimeBins; ++j) {
        if (j != 0) body.push_back(',');
        append_amplitude(body, frame.samples[j]);
      }
      body.push_back('\n');
    }

    const std::filesystem::path csv_path = dir / file;
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("write failed for " + csv_path.string());
  }

  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + manifest_path.string() + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + manifest_path.string());
}

Dataset read_dataset(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("missing manifest: " + manifest_path.string());

  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest_path.string() + ": invalid JSON: " + e.what());
  }

  Dataset dataset;
  if (!manifest.contains("participant") || !manifest["participant"].is_string())
    throw ValidationError(manifest_path.string() + ": missing or invalid 'participant'");
  dataset.manifest.participant = manifest["participant"].get<std::string>();
  if (manifest.contains("seed") && !manifest["seed"].is_null())
    dataset.manifest.seed = manifest["seed"].get<std::int64_t>();
  if (!manifest.contains("frame_sets") || !manifest["frame_sets"].is_array())
    throw ValidationError(manifest_path.string() + ": missing 'frame_sets' array");

  for (const auto& entry : manifest["frame_sets"]) {
    FrameSet fs;
    if (!entry.contains("id") || !entry["id"].is_string())
      throw ValidationError(manifest_path.string() + ": frame set entry without string 'id'");
    fs.id = entry["id"].get<std::string>();
    if (!entry.contains("label"))
      throw ValidationError(manifest_path.string() + ": entry '" + fs.id + "' has no label");
    const std::string label_text = entry["label"].get<std::string>();
    const auto label = parse_state_label(label_text);
    if (!label.has_value())
      throw ValidationError(manifest_path.string() + ": entry '" + fs.id + "': unknown label '" +
                            label_text + "'");
    fs.label = *label;
    if (!entry.contains("fps") || !entry["fps"].is_number())
      throw ValidationError(manifest_path.string() + ": entry '" + fs.id + "' has no numeric fps");
    fs.fps = entry["fps"].get<double>();
    if (!(fs.fps > 0.0))
      throw ValidationError(manifest_path.string() + ": entry '" + fs.id + "': fps must be > 0");
    if (!entry.contains("file") || !entry["file"].is_string())
      throw ValidationError(manifest_path.string() + ": entry '" + fs.id + "' has no file");

    const std::filesystem::path csv_path = dir / entry["file"].get<std::string>();
    std::ifstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("missing frame set file: " + csv_path.string());

    std::string line;
    std::size_t row = 0;
    while (std::getline(csv, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() && csv.peek() == std::char_traits<char>::eof()) break;
      Frame frame;
      std::size_t col = 0;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        const std::string_view field(line.data() + pos,
                                     (comma == std::string::npos ? line.size() : comma) - pos);
        if (col >= kFastTimeBins)
          throw ValidationError(csv_path.string() + ": row " + std::to_string(row) +
                                " has more than 256 columns");
        frame.samples[col] = parse_amplitude(field, csv_path.string(), row, col);
        ++col;
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (col != kFastTimeBins)
        throw ValidationError(csv_path.string() + ": row " + std::to_string(row) + " has " +
                              std::to_string(col) + " columns, expected 256");
      fs.frames.push_back(frame);
      ++row;
    }
    if (fs.frames.empty())
      throw ValidationError(csv_path.string() + ": frame set '" + fs.id + "' has no rows");

    dataset.frame_sets.push_back(std::move(fs));
  }

  validate_dataset(dataset);
  return dataset;
}

}  // namespace uwb
