#include "obsx/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "obsx/errors.hpp"
#include "obsx/explain.hpp"

namespace obsx {

std::vector<double> default_length_scale_grid() {
  constexpr int count = 25;
  constexpr double lo = -4.0;
  constexpr double hi = 2.0;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, lo + (hi - lo) * i / (count - 1));
  }
  return grid;
}

std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, int k_folds,
                                                  std::uint64_t seed) {
  if (k_folds < 2) throw InputError("make_folds: k_folds must be >= 2");
  if (static_cast<Eigen::Index>(k_folds) > n) {
    throw InputError("make_folds: k_folds = " + std::to_string(k_folds) + " exceeds n = " +
                     std::to_string(n));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k_folds));
  const Eigen::Index base = n / k_folds;
  const Eigen::Index extra = n % k_folds;
  Eigen::Index start = 0;
  for (int k = 0; k < k_folds; ++k) {
    const Eigen::Index size = base + (k < extra ? 1 : 0);
    folds[static_cast<std::size_t>(k)].assign(order.begin() + start,
                                              order.begin() + start + size);
    start += size;
  }
  return folds;
}

CvResult cv_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& f_vals, KernelFamily family,
                   const CvConfig& cfg, const OmpConfig& omp_cfg) {
  const Eigen::Index n = X.rows();
  if (f_vals.size() != n) throw InputError("cv_select: point/value count mismatch");

  CvResult result;
  result.grid = cfg.grid.empty() ? default_length_scale_grid() : cfg.grid;
  for (const double candidate : result.grid) {
    if (!(candidate > 0.0) || !std::isfinite(candidate)) {
      throw InputError("cv_select: grid candidates must be positive, got " +
                       std::to_string(candidate));
    }
  }

  const auto folds = make_folds(n, cfg.k_folds, cfg.shuffle_seed);
  // Precompute the complement of each fold once.
  std::vector<std::vector<Eigen::Index>> train_sets(folds.size());
  {
    std::vector<char> in_fold(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < folds.size(); ++k) {
      std::fill(in_fold.begin(), in_fold.end(), 0);
      for (const Eigen::Index i : folds[k]) in_fold[static_cast<std::size_t>(i)] = 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!in_fold[static_cast<std::size_t>(i)]) train_sets[k].push_back(i);
      }
      if (train_sets[k].empty()) {
        throw InputError("cv_select: fold " + std::to_string(k) + " leaves no training points");
      }
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  result.cv_errors.assign(result.grid.size(), nan);

  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    const KernelConfig kernel{family, result.grid[g]};
    double total = 0.0;
    bool usable = true;
    for (std::size_t k = 0; usable && k < folds.size(); ++k) {
      const auto& train = train_sets[k];
      const auto& test = folds[k];
      Eigen::MatrixXd X_train(static_cast<Eigen::Index>(train.size()), X.cols());
      Eigen::VectorXd f_train(static_cast<Eigen::Index>(train.size()));
      for (std::size_t i = 0; i < train.size(); ++i) {
        X_train.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
        f_train[static_cast<Eigen::Index>(i)] = f_vals[train[i]];
      }
      try {
        const SurrogateModel model = build_surrogate(X_train, f_train, kernel, omp_cfg);
        double fold_error = 0.0;
        for (const Eigen::Index i : test) {
          const double diff = f_vals[i] - predict(model, X.row(i).transpose());
          fold_error += diff * diff;
        }
        fold_error /= static_cast<double>(test.size());
        if (!std::isfinite(fold_error)) usable = false;
        total += fold_error;
      } catch (const DegenerateDataError&) {
        usable = false;
      }
    }
    if (!usable || !std::isfinite(total)) {
      result.warnings.push_back("skipped length scale " + std::to_string(result.grid[g]) +
                                ": non-finite cross-validation error");
      continue;
    }
    result.cv_errors[g] = total / static_cast<double>(folds.size());
  }

  // Argmin over usable candidates; ties resolved toward the smaller scale.
  std::size_t best = result.grid.size();
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    if (std::isnan(result.cv_errors[g])) continue;
    if (best == result.grid.size() || result.cv_errors[g] < result.cv_errors[best] ||
        (result.cv_errors[g] == result.cv_errors[best] && result.grid[g] < result.grid[best])) {
      best = g;
    }
  }
  if (best == result.grid.size()) {
    throw DegenerateDataError("cv_select: every candidate produced a non-finite error");
  }
  result.best_length_scale = result.grid[best];
  result.best_error = result.cv_errors[best];
  return result;
}

}  // namespace obsx
