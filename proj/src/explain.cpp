#include "obsx/explain.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "obsx/errors.hpp"

namespace obsx {

namespace {

Eigen::VectorXd predict_samples(const SurrogateModel& model, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd values(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values[i] = predict(model, X.row(i).transpose());
  }
  return values;
}

}  // namespace

namespace {

// The Newton basis restricted to the selected points, a lower-triangular
// m x m block in selection order.
Eigen::MatrixXd selected_block(const NewtonFactorization& fact) {
  const Eigen::Index m = fact.size();
  Eigen::MatrixXd block(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    block.row(k) = fact.newton_at_samples.row(fact.selected[static_cast<std::size_t>(k)]);
  }
  return block;
}

}  // namespace

Eigen::VectorXd kernel_coefficients(const NewtonFactorization& fact, Eigen::Index n) {
  const Eigen::Index m = fact.size();
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
  if (m == 0) return coeffs;
  // c_{i_k} = sum_{j>=k} D(k,j) a_j. With D = V_S^{-T} this is the solution
  // of the triangular system V_S^T c_S = a, which is better conditioned than
  // multiplying by the explicitly accumulated D.
  const Eigen::MatrixXd block = selected_block(fact);
  const Eigen::VectorXd on_selected =
      block.triangularView<Eigen::Lower>().transpose().solve(fact.newton_coeffs);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index idx = fact.selected[static_cast<std::size_t>(k)];
    if (idx < 0 || idx >= n) {
      throw InputError("kernel_coefficients: selected index " + std::to_string(idx) +
                       " out of range for n = " + std::to_string(n));
    }
    coeffs[idx] = on_selected[k];
  }
  return coeffs;
}

SurrogateModel build_surrogate(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals,
                               const KernelConfig& kernel, const OmpConfig& cfg) {
  SurrogateModel model;
  model.kernel = kernel;
  model.newton = fit(X, f_vals, kernel, cfg);
  model.selected_indices = model.newton.selected;

  const Eigen::Index m = model.newton.size();
  model.selected_points.resize(m, X.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    model.selected_points.row(k) = X.row(model.selected_indices[static_cast<std::size_t>(k)]);
  }
  model.kernel_coeffs = kernel_coefficients(model.newton, X.rows());

  // One step of iterative refinement against the selected-block system
  // K_SS c_S = f*_S, using the V_S V_S^T factorization. Counteracts the
  // cancellation in c when the selection runs into small power values.
  if (m > 0) {
    const Eigen::MatrixXd block = selected_block(model.newton);
    const Eigen::MatrixXd k_ss = gram(kernel, model.selected_points);
    Eigen::VectorXd c_sel(m);
    Eigen::VectorXd surrogate_sel(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index idx = model.selected_indices[static_cast<std::size_t>(k)];
      c_sel[k] = model.kernel_coeffs[idx];
      surrogate_sel[k] = f_vals[idx] - model.newton.residuals[idx];
    }
    const Eigen::VectorXd defect = surrogate_sel - k_ss * c_sel;
    const Eigen::VectorXd half = block.triangularView<Eigen::Lower>().solve(defect);
    const Eigen::VectorXd correction =
        block.triangularView<Eigen::Lower>().transpose().solve(half);
    for (Eigen::Index k = 0; k < m; ++k) {
      model.kernel_coeffs[model.selected_indices[static_cast<std::size_t>(k)]] += correction[k];
    }
  }
  return model;
}

double predict(const SurrogateModel& model, const Eigen::VectorXd& y) {
  const Eigen::Index m = static_cast<Eigen::Index>(model.selected_indices.size());
  if (m == 0) return 0.0;
  const Eigen::VectorXd col = kernel_column(model.kernel, model.selected_points, y);
  double value = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    value += model.kernel_coeffs[model.selected_indices[static_cast<std::size_t>(k)]] * col[k];
  }
  return value;
}

double predict_newton(const SurrogateModel& model, const Eigen::VectorXd& y) {
  if (model.newton.size() == 0) return 0.0;
  const Eigen::VectorXd basis =
      evaluate_newton(model.newton, model.kernel, model.selected_points, y);
  return model.newton.newton_coeffs.dot(basis);
}

Eigen::VectorXd explanations(const Eigen::VectorXd& coeffs, bool* degenerate) {
  if (coeffs.size() == 0) throw InputError("explanations: empty coefficient vector");
  if (coeffs.hasNaN()) throw InputError("explanations: NaN coefficient");
  const double peak = coeffs.cwiseAbs().maxCoeff();
  if (degenerate != nullptr) *degenerate = (peak == 0.0);
  if (peak == 0.0) return Eigen::VectorXd::Zero(coeffs.size());
  return coeffs.cwiseAbs() / peak;
}

ObservationErrors observation_errors(const SurrogateModel& model, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& f_vals) {
  if (X.rows() != f_vals.size()) {
    throw InputError("observation_errors: " + std::to_string(f_vals.size()) + " values for " +
                     std::to_string(X.rows()) + " points");
  }
  const Eigen::VectorXd values = predict_samples(model, X);
  ObservationErrors errors;
  errors.absolute = (f_vals - values).cwiseAbs();
  errors.normalized =
      errors.absolute.array() / (1.0 + f_vals.cwiseAbs().array());
  return errors;
}

ExplanationReport explain(const SurrogateModel& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& f_vals, const OmpConfig& cfg) {
  const Eigen::Index n = X.rows();
  if (model.kernel_coeffs.size() != n || f_vals.size() != n ||
      model.newton.residuals.size() != n) {
    throw InputError("explain: model/data size mismatch");
  }

  ExplanationReport report;
  report.gamma = explanations(model.kernel_coeffs, &report.degenerate_gamma);
  report.selected_indices = model.selected_indices;
  report.n_selected = static_cast<Eigen::Index>(model.selected_indices.size());
  report.achieved_tolerance = max_residual(model.newton);
  report.kernel_family = model.kernel.family;
  report.length_scale = model.kernel.length_scale;
  report.tolerance = cfg.tolerance;
  report.stop_reason = model.newton.stop_reason;

  // The kernel-basis route must reproduce the Newton-basis fit; the
  // triangular back-substitution is the easiest place to hide an index bug,
  // so this check stays on in every build.
  const Eigen::VectorXd kernel_values = predict_samples(model, X);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double newton_value = f_vals[i] - model.newton.residuals[i];
    if (std::abs(kernel_values[i] - newton_value) > 1e-7 * (1.0 + std::abs(newton_value))) {
      throw std::runtime_error(
          "explain: kernel-basis and Newton-basis evaluations disagree at sample " +
          std::to_string(i) + " (" + std::to_string(kernel_values[i]) + " vs " +
          std::to_string(newton_value) + "); coefficient back-substitution is inconsistent");
    }
  }
  report.abs_errors = (f_vals - kernel_values).cwiseAbs();
  report.norm_errors = report.abs_errors.array() / (1.0 + f_vals.cwiseAbs().array());

  // Selected points carry nonzero Newton coefficients, so their
  // kernel-translate coefficients cannot vanish.
  for (const Eigen::Index idx : report.selected_indices) {
    assert(report.gamma[idx] > 0.0);
    (void)idx;
  }
  return report;
}

}  // namespace obsx
