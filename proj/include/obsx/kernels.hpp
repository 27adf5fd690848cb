#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

namespace obsx {

enum class KernelFamily { Gaussian, Matern32, Exponential };

/// Parses "gaussian" | "matern32" | "exponential" (case-insensitive).
KernelFamily parse_kernel_family(std::string_view name);
std::string to_string(KernelFamily family);

/// Normalized radial kernel: K(x,x) = 1, K(x,y) = K(y,x), 0 < K <= 1.
struct KernelConfig {
  KernelFamily family = KernelFamily::Gaussian;
  double length_scale = 1.0;
};

/// K(x,y) with r = |x-y|_2 and l = length_scale:
///   Gaussian     exp(-r^2 / (2 l^2))
///   Matern-3/2   (1 + sqrt(3) r/l) exp(-sqrt(3) r/l)
///   Exponential  exp(-r/l)
double kernel_eval(const KernelConfig& cfg, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Column vector [K(x_0,y), ..., K(x_{n-1},y)] for the rows of X.
Eigen::VectorXd kernel_column(const KernelConfig& cfg, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);

/// Dense Gram matrix G(i,j) = K(x_i, x_j); symmetric, unit diagonal.
Eigen::MatrixXd gram(const KernelConfig& cfg, const Eigen::MatrixXd& X);

}  // namespace obsx
