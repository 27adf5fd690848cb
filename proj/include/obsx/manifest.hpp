#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "obsx/explain.hpp"

namespace obsx {

/// Everything needed to reproduce a run: the command, every resolved
/// parameter, input hashes, and the outcome. Serialized as JSON with stable
/// field order next to every report.
struct RunManifest {
  std::string command;
  std::string scenario_or_input;
  std::string target_column;
  std::string kernel_family;
  double length_scale = 0.0;
  double epsilon = 0.0;
  std::int64_t max_points = 0;
  std::uint64_t seed = 0;
  int k_folds = 0;
  std::vector<double> grid;
  std::string input_file_hash;
  std::int64_t n = 0;
  std::int64_t n_selected = 0;
  double achieved_max_residual = 0.0;
  std::string selection_rule = "f-greedy";
  std::string stop_reason;
  std::vector<std::int64_t> selected_indices;
  double wall_time_seconds = 0.0;
};

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Writes report.csv with columns index,gamma,abs_err,selected.
void write_report_csv(const ExplanationReport& report, const std::filesystem::path& path);

}  // namespace obsx
