#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "obsx/kernels.hpp"
#include "obsx/omp.hpp"

namespace obsx {

struct CvConfig {
  int k_folds = 5;
  /// Candidate length scales; empty means default_length_scale_grid().
  std::vector<double> grid;
  std::uint64_t shuffle_seed = 0;
};

/// 25 log-spaced candidates spanning [1e-4, 1e2].
std::vector<double> default_length_scale_grid();

/// Seeded shuffle followed by contiguous split; fold sizes differ by at
/// most one.
std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k_folds,
                                                  std::uint64_t seed);

struct CvResult {
  double best_length_scale = 0.0;
  double best_error = 0.0;
  std::vector<double> grid;
  /// Mean held-out squared prediction error per candidate, aligned with
  /// grid; NaN marks candidates skipped for producing non-finite errors.
  std::vector<double> cv_errors;
  std::vector<std::string> warnings;
};

/// K-fold grid search for the length scale: fits the surrogate on each
/// training portion with the caller's tolerance, scores mean squared
/// prediction error on the held-out portion, and returns the candidate with
/// the smallest average (smallest length scale on ties).
CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals, KernelFamily family,
                   const CvConfig& cfg, const OmpConfig& omp_cfg);

}  // namespace obsx
