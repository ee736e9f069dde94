#pragma once

#include <filesystem>
#include <string>

#include "distil/nn/mlp.hpp"

namespace distil::nn {

// Text snapshot of an MlpNet:
//
//   MLPSNAPSHOT v1
//   layers: s0 s1 ... sk
//   activation: relu|tanh
//   W0 v v v ...        (row-major, 17 significant digits)
//   b0 v v ...
//   ...
//
// Values round-trip bit-exactly.

std::string snapshot_to_string(const MlpNet& net);
MlpNet snapshot_from_string(const std::string& text);

void save_snapshot(const MlpNet& net, const std::filesystem::path& path);
MlpNet load_snapshot(const std::filesystem::path& path);

/// 17-significant-digit decimal, the shared number format for snapshots and CSVs.
std::string format_real(double value);
double parse_real(const std::string& token);

}  // namespace distil::nn
