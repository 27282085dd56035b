#pragma once

#include <filesystem>

#include "uwb/types.hpp"

namespace uwb {

// On-disk layout: <dir>/manifest.json plus one <id>.csv per frame set
// (T rows of 256 comma-separated amplitudes, no header). Amplitudes are
// written as shortest round-trip decimals, so read_dataset(write_dataset(d))
// reproduces d bit-exactly.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace uwb
