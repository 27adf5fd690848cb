#include "obsx/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "obsx/errors.hpp"

namespace obsx {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void check_config(const KernelConfig& cfg) {
  if (!(cfg.length_scale > 0.0) || !std::isfinite(cfg.length_scale)) {
    throw InputError("kernel: length_scale must be positive and finite, got " +
                     std::to_string(cfg.length_scale));
  }
}

void check_point(const Eigen::VectorXd& x, const char* what) {
  if (!x.allFinite()) {
    throw InputError(std::string("kernel: non-finite coordinate in ") + what);
  }
}

// Profile as a function of the squared distance. The squared distance is
// accumulated by per-coordinate subtraction, which keeps small radii accurate
// and makes K(x,y) and K(y,x) bitwise identical.
double profile(const KernelConfig& cfg, double squared_dist) {
  const double l = cfg.length_scale;
  switch (cfg.family) {
    case KernelFamily::Gaussian:
      return std::exp(-squared_dist / (2.0 * l * l));
    case KernelFamily::Matern32: {
      const double a = kSqrt3 * std::sqrt(squared_dist) / l;
      return (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::Exponential:
      return std::exp(-std::sqrt(squared_dist) / l);
  }
  throw InputError("kernel: unknown family");
}

}  // namespace

KernelFamily parse_kernel_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gaussian") return KernelFamily::Gaussian;
  if (lower == "matern32") return KernelFamily::Matern32;
  if (lower == "exponential") return KernelFamily::Exponential;
  throw InputError("unknown kernel family '" + std::string(name) +
                   "' (expected gaussian | matern32 | exponential)");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Exponential: return "exponential";
  }
  return "unknown";
}

double kernel_eval(const KernelConfig& cfg, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_config(cfg);
  if (x.size() != y.size()) {
    throw InputError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  check_point(x, "x");
  check_point(y, "y");
  return profile(cfg, (x - y).squaredNorm());
}

Eigen::VectorXd kernel_column(const KernelConfig& cfg, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
  check_config(cfg);
  if (X.cols() != y.size()) {
    throw InputError("kernel_column: point dimension " + std::to_string(y.size()) +
                     " does not match data dimension " + std::to_string(X.cols()));
  }
  if (!X.allFinite()) throw InputError("kernel_column: non-finite coordinate in X");
  check_point(y, "y");

  const Eigen::Index n = X.rows();
  Eigen::VectorXd col(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    col[i] = profile(cfg, (X.row(i).transpose() - y).squaredNorm());
  }
  return col;
}

Eigen::MatrixXd gram(const KernelConfig& cfg, const Eigen::MatrixXd& X) {
  check_config(cfg);
  if (X.rows() < 1) throw InputError("gram: need at least one point");
  if (!X.allFinite()) throw InputError("gram: non-finite coordinate in X");

  const Eigen::Index n = X.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = profile(cfg, 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = profile(cfg, (X.row(i) - X.row(j)).squaredNorm());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace obsx
