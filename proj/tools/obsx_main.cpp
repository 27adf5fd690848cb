// Command-line front end: simulate | explain | cv.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "obsx/data.hpp"
#include "obsx/errors.hpp"
#include "obsx/explain.hpp"
#include "obsx/hyper.hpp"
#include "obsx/kernels.hpp"
#include "obsx/manifest.hpp"
#include "obsx/omp.hpp"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitDegenerateData = 3;

/// Accepts plain decimals plus "sqrt(x)" so exact scales like sqrt(7) can be
/// passed without rounding.
double parse_scale(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
    const std::string inner = s.substr(5, s.size() - 6);
    return std::sqrt(parse_scale(inner));
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw obsx::InputError("cannot parse '" + text + "' as a length scale");
  }
  if (used != s.size()) throw obsx::InputError("cannot parse '" + text + "' as a length scale");
  return value;
}

/// Grid specs: "a,b,c" (explicit values) or "logspace:lo:hi:count".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.rfind("logspace:", 0) == 0) {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    if (std::sscanf(text.c_str(), "logspace:%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1 ||
        !(lo > 0.0) || !(hi >= lo)) {
      throw obsx::InputError("bad grid spec '" + text + "' (expected logspace:lo:hi:count)");
    }
    if (count == 1) return {lo};
    for (int i = 0; i < count; ++i) {
      grid.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i /
                                                         (count - 1)));
    }
    return grid;
  }
  std::stringstream stream(text);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    grid.push_back(parse_scale(cell));
  }
  if (grid.empty()) throw obsx::InputError("empty grid spec");
  return grid;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void print_summary(const obsx::ExplanationReport& report, Eigen::Index n) {
  std::printf("selected n* = %ld of %ld points (%.1f%% of the data size)\n",
              static_cast<long>(report.n_selected), static_cast<long>(n),
              100.0 * static_cast<double>(report.n_selected) / static_cast<double>(n));
  std::printf("achieved max residual = %.6g (tolerance %.6g, stop: %s)\n",
              report.achieved_tolerance, report.tolerance, obsx::to_string(report.stop_reason));
  if (report.degenerate_gamma) {
    std::printf("all kernel coefficients are zero; explanations are degenerate\n");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(report.gamma.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return report.gamma[a] > report.gamma[b];
  });
  const std::size_t top = std::min<std::size_t>(10, report.selected_indices.size());
  std::printf("top explanations (index: gamma):\n");
  for (std::size_t i = 0; i < top; ++i) {
    std::printf("  %6ld: %.6f\n", static_cast<long>(order[i]), report.gamma[order[i]]);
  }
}

struct FitOutputs {
  obsx::ExplanationReport report;
  double wall_seconds = 0.0;
};

FitOutputs run_fit_and_write(const obsx::Dataset& ds, const obsx::KernelConfig& kernel,
                             const obsx::OmpConfig& omp_cfg,
                             const std::filesystem::path& out_dir, const std::string& name,
                             obsx::RunManifest& manifest) {
  const auto start = std::chrono::steady_clock::now();
  const obsx::SurrogateModel model = obsx::build_surrogate(ds.points, ds.targets, kernel, omp_cfg);
  const obsx::ExplanationReport report = obsx::explain(model, ds.points, ds.targets, omp_cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(out_dir);
  obsx::write_report_csv(report, out_dir / "report.csv");
  obsx::write_tables(report, ds, out_dir, name);

  manifest.kernel_family = obsx::to_string(kernel.family);
  manifest.length_scale = kernel.length_scale;
  manifest.epsilon = omp_cfg.tolerance;
  manifest.max_points = omp_cfg.max_points;
  manifest.n = ds.size();
  manifest.n_selected = report.n_selected;
  manifest.achieved_max_residual = report.achieved_tolerance;
  manifest.stop_reason = obsx::to_string(report.stop_reason);
  manifest.selected_indices.assign(report.selected_indices.begin(),
                                   report.selected_indices.end());
  manifest.wall_time_seconds = elapsed;
  obsx::write_manifest(manifest, out_dir / "manifest.json");

  return FitOutputs{report, elapsed};
}

int cmd_simulate(const std::string& scenario, Eigen::Index n, std::uint64_t seed,
                 std::string kernel_name, std::string scale_text, double epsilon,
                 Eigen::Index max_points, const std::filesystem::path& out_dir) {
  obsx::Dataset ds;
  obsx::KernelConfig kernel;
  if (scenario == "quadratic") {
    ds = obsx::gen_quadratic(n, seed);
    kernel.family = obsx::KernelFamily::Gaussian;
    kernel.length_scale = std::sqrt(7.0);
  } else if (scenario == "ackley") {
    ds = obsx::gen_ackley(n, seed);
    kernel.family = obsx::KernelFamily::Matern32;
    kernel.length_scale = 1.0;
  } else {
    throw obsx::InputError("unknown scenario '" + scenario + "' (expected quadratic | ackley)");
  }
  if (!kernel_name.empty()) kernel.family = obsx::parse_kernel_family(kernel_name);
  if (!scale_text.empty()) kernel.length_scale = parse_scale(scale_text);

  obsx::OmpConfig omp_cfg;
  omp_cfg.tolerance = epsilon;
  omp_cfg.max_points = max_points;

  obsx::RunManifest manifest;
  manifest.command = "simulate";
  manifest.scenario_or_input = scenario;
  manifest.seed = seed;

  std::printf("scenario: %s  n=%ld  kernel=%s  length_scale=%.10g  epsilon=%g  seed=%llu\n",
              scenario.c_str(), static_cast<long>(n), obsx::to_string(kernel.family).c_str(),
              kernel.length_scale, epsilon, static_cast<unsigned long long>(seed));
  const FitOutputs outputs = run_fit_and_write(ds, kernel, omp_cfg, out_dir, scenario, manifest);
  print_summary(outputs.report, ds.size());
  std::printf("wall time: %.3f s; outputs in %s\n", outputs.wall_seconds,
              out_dir.string().c_str());
  return 0;
}

int cmd_explain(const std::filesystem::path& csv_path, const std::string& target,
                const std::string& kernel_name, const std::string& scale_text, double epsilon,
                Eigen::Index max_points, const std::filesystem::path& out_dir) {
  obsx::Dataset raw = obsx::load_csv(csv_path, target);
  print_warnings(raw.warnings);
  const obsx::Dataset ds = obsx::standardize(raw);

  obsx::KernelConfig kernel;
  kernel.family = obsx::parse_kernel_family(kernel_name);
  kernel.length_scale = parse_scale(scale_text);

  obsx::OmpConfig omp_cfg;
  omp_cfg.tolerance = epsilon;
  omp_cfg.max_points = max_points;

  obsx::RunManifest manifest;
  manifest.command = "explain";
  manifest.scenario_or_input = csv_path.string();
  manifest.target_column = target;
  manifest.input_file_hash = obsx::hash_file(csv_path);

  std::printf("input: %s  n=%ld  p=%ld  kernel=%s  length_scale=%.10g  epsilon=%g\n",
              csv_path.string().c_str(), static_cast<long>(ds.size()),
              static_cast<long>(ds.dim()), obsx::to_string(kernel.family).c_str(),
              kernel.length_scale, epsilon);
  const FitOutputs outputs =
      run_fit_and_write(ds, kernel, omp_cfg, out_dir, csv_path.stem().string(), manifest);
  print_summary(outputs.report, ds.size());
  std::printf("wall time: %.3f s; outputs in %s\n", outputs.wall_seconds,
              out_dir.string().c_str());
  return 0;
}

int cmd_cv(const std::filesystem::path& csv_path, const std::string& target,
           const std::string& family_name, const std::string& grid_spec, int k_folds,
           std::uint64_t seed, double epsilon, const std::filesystem::path& out_dir) {
  obsx::Dataset raw = obsx::load_csv(csv_path, target);
  print_warnings(raw.warnings);
  const obsx::Dataset ds = obsx::standardize(raw);

  obsx::CvConfig cv_cfg;
  cv_cfg.k_folds = k_folds;
  cv_cfg.shuffle_seed = seed;
  if (!grid_spec.empty()) cv_cfg.grid = parse_grid(grid_spec);

  obsx::OmpConfig omp_cfg;
  omp_cfg.tolerance = epsilon;

  const obsx::CvResult result =
      obsx::cv_select(ds.points, ds.targets, obsx::parse_kernel_family(family_name), cv_cfg,
                      omp_cfg);
  print_warnings(result.warnings);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path curve_path = out_dir / "cv_curve.csv";
  {
    std::ofstream out(curve_path);
    if (!out) throw obsx::InputError("cannot write '" + curve_path.string() + "'");
    out << "length_scale,cv_error\n";
    char buffer[64];
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
      std::snprintf(buffer, sizeof buffer, "%.17g,%.17g", result.grid[g], result.cv_errors[g]);
      out << buffer << '\n';
    }
  }
  std::printf("best length scale: %.10g\n", result.best_length_scale);
  std::printf("cross-validation error at best: %.10g\n", result.best_error);
  std::printf("curve written to %s\n", curve_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel surrogate models with per-observation importance scores"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario and explain it");
  std::string scenario;
  simulate->add_option("scenario", scenario, "quadratic | ackley")->required();
  Eigen::Index sim_n = 1000;
  simulate->add_option("--n", sim_n, "number of sample points");
  std::uint64_t sim_seed = 42;
  simulate->add_option("--seed", sim_seed, "random seed");
  std::string sim_kernel;
  simulate->add_option("--kernel", sim_kernel, "kernel family (default depends on scenario)");
  std::string sim_scale;
  simulate->add_option("--length-scale", sim_scale,
                       "length scale, e.g. 2.6458 or sqrt(7) (default depends on scenario)");
  double sim_eps = 1e-3;
  simulate->add_option("--epsilon", sim_eps, "stopping tolerance on the max residual");
  Eigen::Index sim_max = 0;
  simulate->add_option("--max-points", sim_max, "cap on selected points (0 = no cap)");
  std::string sim_out = "out";
  simulate->add_option("--out-dir", sim_out, "output directory");

  // explain
  auto* explain = app.add_subcommand("explain", "explain a CSV dataset of predictions");
  std::string csv_path;
  explain->add_option("csv", csv_path, "input CSV file")->required();
  std::string target = "prediction";
  explain->add_option("--target", target, "name of the prediction column");
  std::string exp_kernel = "gaussian";
  explain->add_option("--kernel", exp_kernel, "kernel family");
  std::string exp_scale = "1.0";
  explain->add_option("--length-scale", exp_scale, "length scale, e.g. 0.5 or sqrt(7)");
  double exp_eps = 1e-2;
  explain->add_option("--epsilon", exp_eps, "stopping tolerance on the max residual");
  Eigen::Index exp_max = 0;
  explain->add_option("--max-points", exp_max, "cap on selected points (0 = no cap)");
  std::string exp_out = "out";
  explain->add_option("--out-dir", exp_out, "output directory");

  // cv
  auto* cv = app.add_subcommand("cv", "cross-validate the kernel length scale");
  std::string cv_csv;
  cv->add_option("csv", cv_csv, "input CSV file")->required();
  std::string cv_target = "prediction";
  cv->add_option("--target", cv_target, "name of the prediction column");
  std::string cv_family = "gaussian";
  cv->add_option("--kernel", cv_family, "kernel family");
  std::string cv_grid;
  cv->add_option("--grid", cv_grid, "comma list or logspace:lo:hi:count (default 25 log-spaced)");
  int cv_k = 5;
  cv->add_option("--k-folds", cv_k, "number of folds");
  std::uint64_t cv_seed = 42;
  cv->add_option("--seed", cv_seed, "fold shuffle seed");
  double cv_eps = 1e-2;
  cv->add_option("--epsilon", cv_eps, "stopping tolerance used inside each fold");
  std::string cv_out = "out";
  cv->add_option("--out-dir", cv_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(scenario, sim_n, sim_seed, sim_kernel, sim_scale, sim_eps, sim_max,
                          sim_out);
    }
    if (explain->parsed()) {
      return cmd_explain(csv_path, target, exp_kernel, exp_scale, exp_eps, exp_max, exp_out);
    }
    if (cv->parsed()) {
      return cmd_cv(cv_csv, cv_target, cv_family, cv_grid, cv_k, cv_seed, cv_eps, cv_out);
    }
  } catch (const obsx::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const obsx::DegenerateDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerateData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
