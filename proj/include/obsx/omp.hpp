#pragma once

#include <Eigen/Dense>
#include <vector>

#include "obsx/kernels.hpp"

namespace obsx {

/// Candidates whose remaining power-function value P^2 drops below
/// kPowerFloor * K(x,x) are never selected; dividing by sqrt(P^2) past that
/// point would amplify round-off without improving the fit.
inline constexpr double kPowerFloor = 1e-12;

struct OmpConfig {
  /// Stop once max_i |f(x_i) - f*(x_i)| <= tolerance.
  double tolerance = 1e-3;
  /// Cap on the number of selected points; 0 means "up to n".
  Eigen::Index max_points = 0;
};

enum class StopReason {
  ToleranceReached,
  MaxPointsReached,
  /// Every remaining candidate fell below the power floor (duplicate or
  /// near-duplicate points); the achieved residual may exceed the tolerance.
  PowerFloorExhausted,
};

const char* to_string(StopReason reason);

/// Output of the greedy pursuit: an adaptively selected index set together
/// with the triangular Newton basis built on it.
///
/// With m = selected.size():
///   newton_at_samples  n x m,  column j holds N_j at every sample point
///   change_of_basis    m x m upper triangular D; N_j = sum_k D(k,j) K(x_{i_k}, .)
///   newton_coeffs      m,      expansion f* = sum_j a_j N_j
///   power_diag         n,      remaining P^2 at every sample point
///   residuals          n,      f - f* at every sample point
struct NewtonFactorization {
  std::vector<Eigen::Index> selected;
  Eigen::MatrixXd newton_at_samples;
  Eigen::MatrixXd change_of_basis;
  Eigen::VectorXd newton_coeffs;
  Eigen::VectorXd power_diag;
  Eigen::VectorXd residuals;
  /// max |residual| before the first step, after each step (size m+1).
  std::vector<double> max_residual_history;
  StopReason stop_reason = StopReason::ToleranceReached;

  Eigen::Index size() const { return static_cast<Eigen::Index>(selected.size()); }
};

/// Greedy pursuit over kernel translates. Each step selects the unselected
/// sample with the largest absolute residual (lowest index on ties), extends
/// the Newton basis by Gram-Schmidt against the translates already chosen,
/// and interpolates the new value. Deterministic for identical inputs.
NewtonFactorization fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals,
                        const KernelConfig& kernel, const OmpConfig& cfg);

/// [N_1(y), ..., N_m(y)] from the change of basis and the selected points.
Eigen::VectorXd evaluate_newton(const NewtonFactorization& fact, const KernelConfig& kernel,
                                const Eigen::MatrixXd& selected_points, const Eigen::VectorXd& y);

/// max_i |f(x_i) - f*(x_i)| over all samples (equals f's max norm when
/// nothing was selected).
double max_residual(const NewtonFactorization& fact);

}  // namespace obsx
