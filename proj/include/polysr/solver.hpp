#pragma once

// Damped least squares around a prior:
//   b_hat = b - A x0
//   dx    = argmin ||A dx - b_hat||^2 + lambda ||dx||^2
//   x     = x0 + dx

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "polysr/operator.hpp"

namespace polysr {

enum class SolveMethod { NormalEquationsCG, DampedLSQR };

struct SolveConfig {
  double lambda = 0.05;
  /// Unset means 10 * n_cols.
  std::optional<int> max_iterations;
  /// Stop once ||A^T b_hat - (A^T A + lambda I) dx|| <= tolerance * ||A^T b_hat||.
  double tolerance = 1e-8;
  SolveMethod method = SolveMethod::NormalEquationsCG;

  void validate() const;
  int iteration_budget(Eigen::Index n_cols) const;
};

struct SolveReport {
  int iterations_used = 0;
  /// Augmented residual sqrt(||A dx - b_hat||^2 + lambda ||dx||^2) at the
  /// start and after every iteration; plain ||A dx - b_hat|| when lambda = 0.
  std::vector<double> residual_history;
  bool converged = false;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Running out of iterations is not an error: the last iterate is returned
/// with converged = false.
SolveResult solve_damped(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& b_hat,
                         const SolveConfig& cfg);

/// Solves around the prior x0. Right-hand-side entries for empty operator
/// rows are zeroed before the solve.
SolveResult reconstruct(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, const SolveConfig& cfg);

/// ||A dx - b_hat||^2 + lambda ||dx||^2
double damped_objective(const SparseOperator& a, const Eigen::Ref<const Eigen::VectorXd>& dx,
                        const Eigen::Ref<const Eigen::VectorXd>& b_hat, double lambda);

}  // namespace polysr
