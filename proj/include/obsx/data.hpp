#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "obsx/explain.hpp"

namespace obsx {

struct ColumnStats {
  double mean = 0.0;
  double stddev = 1.0;  // population (divisor n)
};

struct Dataset {
  Eigen::MatrixXd points;   // n x p
  Eigen::VectorXd targets;  // n
  std::vector<std::string> column_names;
  std::string target_name;
  std::optional<std::vector<ColumnStats>> standardization;
  Eigen::Index dropped_rows = 0;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

/// Reads a comma-separated file with a header row. Numeric columns other
/// than the target become features; non-numeric columns are dropped with a
/// warning; rows with a missing or unparseable numeric cell are dropped and
/// counted (more than half dropped is an error).
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column);

/// Rescales every feature column to zero mean and unit population variance,
/// recording the transform. Constant columns are an error.
Dataset standardize(const Dataset& ds);

/// f(x1,x2) = x1^2 + x2^2 + 1 over i.i.d. standard normal inputs.
double quadratic_target(double x1, double x2);
Dataset gen_quadratic(Eigen::Index n, std::uint64_t seed);

/// Ackley function (a=20, b=0.2, c=2*pi) over i.i.d. standard normal inputs.
double ackley_target(double x1, double x2);
Dataset gen_ackley(Eigen::Index n, std::uint64_t seed);

/// Writes the plot-data tables: <name>_full.txt with columns
/// X1..Xp Y_pred Abs_err over all rows, and <name>_expl.txt with columns
/// X1..Xp Y_pred Gamma over the selected rows only. Space-delimited, header
/// row, 9 significant digits.
void write_tables(const ExplanationReport& report, const Dataset& ds,
                  const std::filesystem::path& out_dir, const std::string& name);

}  // namespace obsx
