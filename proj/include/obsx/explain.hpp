#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "obsx/kernels.hpp"
#include "obsx/omp.hpp"

namespace obsx {

/// Surrogate f*(x) = sum_k c_{i_k} K(x_{i_k}, x) over the selected subsample.
/// kernel_coeffs has one entry per original sample; it is exactly zero for
/// unselected indices.
struct SurrogateModel {
  KernelConfig kernel;
  Eigen::MatrixXd selected_points;  // m x p, in selection order
  std::vector<Eigen::Index> selected_indices;
  Eigen::VectorXd kernel_coeffs;  // length n
  NewtonFactorization newton;
};

/// Kernel-translate coefficients of the fitted surrogate,
/// c_{i_k} = sum_{j>=k} D(k,j) a_j, scattered into a length-n vector that is
/// exactly zero off the selected set.
Eigen::VectorXd kernel_coefficients(const NewtonFactorization& fact, Eigen::Index n);

/// fit() plus coefficient back-substitution and selected-point gathering.
SurrogateModel build_surrogate(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals,
                               const KernelConfig& kernel, const OmpConfig& cfg);

/// Kernel-basis prediction sum_k c_{i_k} K(x_{i_k}, y).
double predict(const SurrogateModel& model, const Eigen::VectorXd& y);

/// Newton-basis prediction sum_j a_j N_j(y); agrees with predict() up to
/// round-off and is kept as an independent evaluation route.
double predict_newton(const SurrogateModel& model, const Eigen::VectorXd& y);

/// gamma_i = |c_i| / max_j |c_j|. An all-zero coefficient vector yields
/// all-zero gamma and sets *degenerate instead of dividing by zero.
Eigen::VectorXd explanations(const Eigen::VectorXd& coeffs, bool* degenerate = nullptr);

struct ObservationErrors {
  Eigen::VectorXd absolute;    // |f(x_i) - f*(x_i)|
  Eigen::VectorXd normalized;  // |f(x_i) - f*(x_i)| / (1 + |f(x_i)|)
};

ObservationErrors observation_errors(const SurrogateModel& model, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& f_vals);

/// Per-observation importance scores plus fit diagnostics and run metadata.
struct ExplanationReport {
  Eigen::VectorXd gamma;
  Eigen::VectorXd abs_errors;
  Eigen::VectorXd norm_errors;
  std::vector<Eigen::Index> selected_indices;
  double achieved_tolerance = 0.0;
  Eigen::Index n_selected = 0;
  bool degenerate_gamma = false;

  KernelFamily kernel_family = KernelFamily::Gaussian;
  double length_scale = 0.0;
  double tolerance = 0.0;
  std::string selection_rule = "f-greedy";
  StopReason stop_reason = StopReason::ToleranceReached;
};

/// Assembles the report for a fitted surrogate. Re-evaluates the surrogate in
/// the kernel basis and cross-checks it against the Newton-basis residuals;
/// a disagreement beyond 1e-7 * (1 + |f*|) means the triangular
/// back-substitution went wrong and raises an error.
ExplanationReport explain(const SurrogateModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& f_vals, const OmpConfig& cfg);

}  // namespace obsx
