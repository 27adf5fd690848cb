#include "obsx/omp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "obsx/errors.hpp"

namespace obsx {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ToleranceReached: return "tolerance_reached";
    case StopReason::MaxPointsReached: return "max_points_reached";
    case StopReason::PowerFloorExhausted: return "power_floor_exhausted";
  }
  return "unknown";
}

NewtonFactorization fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals,
                        const KernelConfig& kernel, const OmpConfig& cfg) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw InputError("fit: empty sample set");
  if (f_vals.size() != n) {
    throw InputError("fit: " + std::to_string(f_vals.size()) + " prediction values for " +
                     std::to_string(n) + " points");
  }
  if (!f_vals.allFinite()) throw InputError("fit: non-finite prediction value");
  if (!X.allFinite()) throw InputError("fit: non-finite sample coordinate");
  if (!(cfg.tolerance >= 0.0)) throw InputError("fit: tolerance must be >= 0");
  if (cfg.max_points < 0) throw InputError("fit: max_points must be >= 0");

  const Eigen::Index cap =
      cfg.max_points == 0 ? n : std::min<Eigen::Index>(cfg.max_points, n);

  NewtonFactorization fact;
  fact.residuals = f_vals;
  fact.power_diag.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    fact.power_diag[i] = kernel_eval(kernel, X.row(i).transpose(), X.row(i).transpose());
  }
  const Eigen::VectorXd unit_power = fact.power_diag;  // K(x_i, x_i), the floor reference

  Eigen::MatrixXd V(n, cap);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(cap, cap);
  Eigen::VectorXd coeffs(cap);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  fact.max_residual_history.push_back(fact.residuals.cwiseAbs().maxCoeff());
  Eigen::Index m = 0;
  fact.stop_reason = StopReason::ToleranceReached;

  while (true) {
    if (fact.max_residual_history.back() <= cfg.tolerance) {
      fact.stop_reason = StopReason::ToleranceReached;
      break;
    }
    if (m == cap) {
      fact.stop_reason = StopReason::MaxPointsReached;
      break;
    }

    // f-greedy: largest |residual| among candidates above the power floor,
    // lowest index on exact ties.
    Eigen::Index pick = -1;
    double pick_val = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (chosen[static_cast<std::size_t>(i)]) continue;
      if (fact.power_diag[i] < kPowerFloor * unit_power[i]) continue;
      const double v = std::abs(fact.residuals[i]);
      if (v > pick_val) {
        pick_val = v;
        pick = i;
      }
    }
    if (pick < 0) {
      if (m == 0) {
        throw DegenerateDataError(
            "fit: no candidate has a power-function value above the floor " +
            std::to_string(kPowerFloor) + " * K(x,x) before any point was selected");
      }
      fact.stop_reason = StopReason::PowerFloorExhausted;
      break;
    }

    // Gram-Schmidt step: orthogonalize the picked translate against the
    // basis so far and normalize by the power-function value.
    Eigen::VectorXd u = kernel_column(kernel, X, X.row(pick).transpose());
    if (m > 0) {
      u.noalias() -= V.leftCols(m) * V.row(pick).head(m).transpose();
    }
    const double norm = std::sqrt(fact.power_diag[pick]);
    V.col(m) = u / norm;

    D(m, m) = 1.0 / norm;
    if (m > 0) {
      D.col(m).head(m).noalias() =
          -(D.topLeftCorner(m, m) * V.row(pick).head(m).transpose()) / norm;
    }

    const double a = fact.residuals[pick] / V(pick, m);
    coeffs[m] = a;
    fact.selected.push_back(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;

    fact.power_diag.array() -= V.col(m).array().square();
    fact.residuals.noalias() -= a * V.col(m);
    ++m;

    fact.max_residual_history.push_back(fact.residuals.cwiseAbs().maxCoeff());
  }

  fact.newton_at_samples = V.leftCols(m);
  fact.change_of_basis = D.topLeftCorner(m, m);
  fact.newton_coeffs = coeffs.head(m);
  return fact;
}

Eigen::VectorXd evaluate_newton(const NewtonFactorization& fact, const KernelConfig& kernel,
                                const Eigen::MatrixXd& selected_points, const Eigen::VectorXd& y) {
  const Eigen::Index m = fact.size();
  if (selected_points.rows() != m) {
    throw InputError("evaluate_newton: expected " + std::to_string(m) + " selected points, got " +
                     std::to_string(selected_points.rows()));
  }
  if (m == 0) return Eigen::VectorXd();
  const Eigen::VectorXd col = kernel_column(kernel, selected_points, y);
  return fact.change_of_basis.transpose() * col;
}

double max_residual(const NewtonFactorization& fact) {
  if (fact.residuals.size() == 0) return 0.0;
  return fact.residuals.cwiseAbs().maxCoeff();
}

}  // namespace obsx
