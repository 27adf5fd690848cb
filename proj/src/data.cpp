#include "obsx/data.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "obsx/errors.hpp"

namespace obsx {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(value)) {
    return false;
  }
  *out = value;
  return true;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column) {
  std::ifstream file(path);
  if (!file) throw InputError("load_csv: cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(file, line)) throw InputError("load_csv: empty file '" + path.string() + "'");
  const std::vector<std::string> header = split_csv_line(line);
  const std::size_t n_cols = header.size();
  if (n_cols == 0) throw InputError("load_csv: empty header row");

  std::size_t target_idx = n_cols;
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (header[j] == target_column) target_idx = j;
  }
  if (target_idx == n_cols) {
    throw InputError("load_csv: target column '" + target_column + "' not found in '" +
                     path.string() + "'");
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    cells.resize(n_cols);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw InputError("load_csv: no data rows in '" + path.string() + "'");

  // A column is numeric when more than half of its non-empty cells parse.
  std::vector<bool> numeric(n_cols, false);
  for (std::size_t j = 0; j < n_cols; ++j) {
    std::size_t parsed = 0;
    std::size_t non_empty = 0;
    for (const auto& row : rows) {
      if (row[j].empty()) continue;
      ++non_empty;
      double value = 0.0;
      if (parse_double(row[j], &value)) ++parsed;
    }
    numeric[j] = non_empty > 0 && 2 * parsed > non_empty;
  }
  if (!numeric[target_idx]) {
    throw InputError("load_csv: target column '" + target_column + "' is not numeric");
  }

  Dataset ds;
  std::vector<std::size_t> feature_idx;
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (j == target_idx) continue;
    if (!numeric[j]) {
      ds.warnings.push_back("dropped non-numeric column '" + header[j] + "'");
      continue;
    }
    feature_idx.push_back(j);
    ds.column_names.push_back(header[j]);
  }
  if (feature_idx.empty()) throw InputError("load_csv: no numeric feature columns");

  const std::size_t p = feature_idx.size();
  std::vector<std::vector<double>> kept;
  kept.reserve(rows.size());
  std::vector<double> values(p + 1);
  for (const auto& row : rows) {
    bool ok = parse_double(row[target_idx], &values[p]);
    for (std::size_t k = 0; ok && k < p; ++k) {
      ok = parse_double(row[feature_idx[k]], &values[k]);
    }
    if (ok) {
      kept.push_back(values);
    } else {
      ++ds.dropped_rows;
    }
  }
  if (kept.empty()) throw InputError("load_csv: zero usable rows in '" + path.string() + "'");
  if (2 * static_cast<std::size_t>(ds.dropped_rows) > rows.size()) {
    throw InputError("load_csv: dropped " + std::to_string(ds.dropped_rows) + " of " +
                     std::to_string(rows.size()) + " rows; more than half are unusable");
  }
  if (ds.dropped_rows > 0) {
    ds.warnings.push_back("dropped " + std::to_string(ds.dropped_rows) +
                          " row(s) with missing or unparseable cells");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(kept.size());
  ds.points.resize(n, static_cast<Eigen::Index>(p));
  ds.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      ds.points(i, static_cast<Eigen::Index>(k)) = kept[static_cast<std::size_t>(i)][k];
    }
    ds.targets[i] = kept[static_cast<std::size_t>(i)][p];
  }
  ds.target_name = target_column;
  return ds;
}

Dataset standardize(const Dataset& ds) {
  const Eigen::Index n = ds.size();
  const Eigen::Index p = ds.dim();
  if (n < 1) throw InputError("standardize: empty dataset");

  Dataset out = ds;
  std::vector<ColumnStats> stats(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = ds.points.col(j).mean();
    const double variance = (ds.points.col(j).array() - mean).square().sum() / double(n);
    const double stddev = std::sqrt(variance);
    if (!(stddev > 0.0)) {
      const std::string name = static_cast<std::size_t>(j) < ds.column_names.size()
                                   ? ds.column_names[static_cast<std::size_t>(j)]
                                   : std::to_string(j);
      throw InputError("standardize: column '" + name + "' is constant");
    }
    out.points.col(j) = (ds.points.col(j).array() - mean) / stddev;
    stats[static_cast<std::size_t>(j)] = ColumnStats{mean, stddev};
  }
  out.standardization = std::move(stats);
  return out;
}

double quadratic_target(double x1, double x2) { return x1 * x1 + x2 * x2 + 1.0; }

double ackley_target(double x1, double x2) {
  const double a = 20.0;
  const double b = 0.2;
  const double c = 2.0 * std::numbers::pi;
  return -a * std::exp(-b * std::sqrt(0.5 * (x1 * x1 + x2 * x2))) -
         std::exp(0.5 * (std::cos(c * x1) + std::cos(c * x2))) + a + std::numbers::e;
}

namespace {

Dataset generate_bivariate(Eigen::Index n, std::uint64_t seed, double (*target)(double, double),
                           const std::string& target_name) {
  if (n < 1) throw InputError("generator: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset ds;
  ds.points.resize(n, 2);
  ds.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x1 = normal(rng);
    const double x2 = normal(rng);
    ds.points(i, 0) = x1;
    ds.points(i, 1) = x2;
    ds.targets[i] = target(x1, x2);
  }
  ds.column_names = {"X1", "X2"};
  ds.target_name = target_name;
  return ds;
}

}  // namespace

Dataset gen_quadratic(Eigen::Index n, std::uint64_t seed) {
  return generate_bivariate(n, seed, &quadratic_target, "quadratic");
}

Dataset gen_ackley(Eigen::Index n, std::uint64_t seed) {
  return generate_bivariate(n, seed, &ackley_target, "ackley");
}

void write_tables(const ExplanationReport& report, const Dataset& ds,
                  const std::filesystem::path& out_dir, const std::string& name) {
  const Eigen::Index n = ds.size();
  const Eigen::Index p = ds.dim();
  if (report.gamma.size() != n || report.abs_errors.size() != n) {
    throw InputError("write_tables: report and dataset disagree on n");
  }
  std::filesystem::create_directories(out_dir);

  const auto write_row = [p](std::ofstream& out, const Dataset& data, Eigen::Index i,
                             double last) {
    char buffer[32];
    for (Eigen::Index j = 0; j < p; ++j) {
      std::snprintf(buffer, sizeof buffer, "%.9g", data.points(i, j));
      out << buffer << ' ';
    }
    std::snprintf(buffer, sizeof buffer, "%.9g", data.targets[i]);
    out << buffer << ' ';
    std::snprintf(buffer, sizeof buffer, "%.9g", last);
    out << buffer << '\n';
  };

  const auto header = [&](std::ofstream& out, const char* last) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (static_cast<std::size_t>(j) < ds.column_names.size()) {
        out << ds.column_names[static_cast<std::size_t>(j)] << ' ';
      } else {
        out << 'X' << (j + 1) << ' ';
      }
    }
    out << "Y_pred " << last << '\n';
  };

  const std::filesystem::path full_path = out_dir / (name + "_full.txt");
  std::ofstream full(full_path);
  if (!full) throw InputError("write_tables: cannot write '" + full_path.string() + "'");
  header(full, "Abs_err");
  for (Eigen::Index i = 0; i < n; ++i) write_row(full, ds, i, report.abs_errors[i]);

  const std::filesystem::path expl_path = out_dir / (name + "_expl.txt");
  std::ofstream expl(expl_path);
  if (!expl) throw InputError("write_tables: cannot write '" + expl_path.string() + "'");
  header(expl, "Gamma");
  for (const Eigen::Index i : report.selected_indices) {
    write_row(expl, ds, i, report.gamma[i]);
  }
}

}  // namespace obsx
