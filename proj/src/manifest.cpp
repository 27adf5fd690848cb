#include "obsx/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "obsx/errors.hpp"

namespace obsx {

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("hash_file: cannot open '" + path.string() + "'");
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buffer[4096];
  while (file.read(buffer, sizeof buffer) || file.gcount() > 0) {
    for (std::streamsize i = 0; i < file.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(hash));
  return out;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["input"] = manifest.scenario_or_input;
  j["target_column"] = manifest.target_column;
  j["kernel_family"] = manifest.kernel_family;
  j["length_scale"] = manifest.length_scale;
  j["epsilon"] = manifest.epsilon;
  j["max_points"] = manifest.max_points;
  j["seed"] = manifest.seed;
  j["k_folds"] = manifest.k_folds;
  j["grid"] = manifest.grid;
  j["input_file_hash"] = manifest.input_file_hash;
  j["n"] = manifest.n;
  j["n_selected"] = manifest.n_selected;
  j["achieved_max_residual"] = manifest.achieved_max_residual;
  j["selection_rule"] = manifest.selection_rule;
  j["stop_reason"] = manifest.stop_reason;
  j["selected_indices"] = manifest.selected_indices;
  j["wall_time_seconds"] = manifest.wall_time_seconds;

  std::ofstream out(path);
  if (!out) throw InputError("write_manifest: cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void write_report_csv(const ExplanationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("write_report_csv: cannot write '" + path.string() + "'");
  std::vector<char> selected(static_cast<std::size_t>(report.gamma.size()), 0);
  for (const Eigen::Index idx : report.selected_indices) {
    selected[static_cast<std::size_t>(idx)] = 1;
  }
  out << "index,gamma,abs_err,selected\n";
  char buffer[96];
  for (Eigen::Index i = 0; i < report.gamma.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%ld,%.17g,%.17g,%d", static_cast<long>(i),
                  report.gamma[i], report.abs_errors[i],
                  selected[static_cast<std::size_t>(i)] ? 1 : 0);
    out << buffer << '\n';
  }
}

}  // namespace obsx
