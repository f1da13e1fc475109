#include "polysr/solver.hpp"

#include <cmath>
#include <limits>

namespace polysr {

namespace {

using Eigen::VectorXd;

double normal_residual(const SparseOperator& a, const VectorXd& x, const Eigen::Ref<const VectorXd>& b_hat,
                       double lambda) {
  const VectorXd r = b_hat - a.matrix() * x;
  return (a.matrix().transpose() * r - lambda * x).norm();
}

// Conjugate gradients on (A^T A + lambda I) x = A^T b, in the least-squares
// form that never builds A^T A.
SolveResult solve_cg(const SparseOperator& a, const Eigen::Ref<const VectorXd>& b, const SolveConfig& cfg) {
  const double lambda = cfg.lambda;
  SolveResult out;
  VectorXd& x = out.x;
  x = VectorXd::Zero(a.n_cols());
  SolveReport& rep = out.report;

  VectorXd r = b;
  VectorXd s = a.matrix().transpose() * r;
  VectorXd p = s;
  double gamma = s.squaredNorm();
  const double rhs_norm = std::sqrt(gamma);
  rep.residual_history.push_back(r.norm());
  if (rhs_norm == 0.0) {
    rep.converged = true;
    return out;
  }

  const int budget = cfg.iteration_budget(a.n_cols());
  VectorXd q(a.n_rows());
  for (int it = 0; it < budget; ++it) {
    q.noalias() = a.matrix() * p;
    const double curvature = q.squaredNorm() + lambda * p.squaredNorm();
    if (!(curvature > 0.0)) break;
    const double alpha = gamma / curvature;
    x += alpha * p;
    r -= alpha * q;
    s.noalias() = a.matrix().transpose() * r;
    s -= lambda * x;
    const double gamma_next = s.squaredNorm();
    rep.iterations_used = it + 1;
    rep.residual_history.push_back(std::sqrt(r.squaredNorm() + lambda * x.squaredNorm()));
    if (std::sqrt(gamma_next) <= cfg.tolerance * rhs_norm) {
      rep.converged = true;
      break;
    }
    p = s + (gamma_next / gamma) * p;
    gamma = gamma_next;
  }
  return out;
}

// LSQR (Golub-Kahan bidiagonalization) on the augmented system
// [A; sqrt(lambda) I] x = [b; 0].
SolveResult solve_lsqr(const SparseOperator& a, const Eigen::Ref<const VectorXd>& b, const SolveConfig& cfg) {
  const double damp = std::sqrt(cfg.lambda);
  SolveResult out;
  VectorXd& x = out.x;
  x = VectorXd::Zero(a.n_cols());
  SolveReport& rep = out.report;

  VectorXd u = b;
  double beta = u.norm();
  if (beta > 0) u /= beta;
  VectorXd v = a.matrix().transpose() * u;
  double alpha = v.norm();
  if (alpha > 0) v /= alpha;

  rep.residual_history.push_back(beta);
  const double rhs_norm = alpha * beta;  // ||A^T b||
  if (rhs_norm == 0.0) {
    rep.converged = true;
    return out;
  }

  VectorXd w = v;
  double phibar = beta;
  double rhobar = alpha;
  double damp_residual_sq = 0.0;

  const int budget = cfg.iteration_budget(a.n_cols());
  for (int it = 0; it < budget; ++it) {
    u = a.matrix() * v - alpha * u;
    beta = u.norm();
    if (beta > 0) u /= beta;
    v = a.matrix().transpose() * u - beta * v;
    alpha = v.norm();
    if (alpha > 0) v /= alpha;

    // Fold the damping row into the bidiagonal.
    const double rhobar1 = std::hypot(rhobar, damp);
    const double cs1 = rhobar / rhobar1;
    const double sn1 = damp / rhobar1;
    const double psi = sn1 * phibar;
    phibar *= cs1;

    const double rho = std::hypot(rhobar1, beta);
    const double cs = rhobar1 / rho;
    const double sn = beta / rho;
    const double theta = sn * alpha;
    rhobar = -cs * alpha;
    const double phi = cs * phibar;
    phibar *= sn;
    const double tau = sn * phi;

    x += (phi / rho) * w;
    w = v - (theta / rho) * w;

    damp_residual_sq += psi * psi;
    rep.iterations_used = it + 1;
    rep.residual_history.push_back(std::sqrt(phibar * phibar + damp_residual_sq));

    // alpha * |tau| estimates ||A^T r - lambda x||; confirm before stopping.
    const double estimate = alpha * std::abs(tau);
    if (estimate <= cfg.tolerance * rhs_norm || alpha == 0.0) {
      if (normal_residual(a, x, b, cfg.lambda) <= cfg.tolerance * rhs_norm) {
        rep.converged = true;
        break;
      }
      if (alpha == 0.0) break;
    }
  }
  return out;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (max_iterations && *max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
}

int SolveConfig::iteration_budget(Eigen::Index n_cols) const {
  if (max_iterations) return *max_iterations;
  const Eigen::Index n = 10 * n_cols;
  return n > std::numeric_limits<int>::max() ? std::numeric_limits<int>::max() : static_cast<int>(std::max<Eigen::Index>(n, 1));
}

SolveResult solve_damped(const SparseOperator& a, const Eigen::Ref<const VectorXd>& b_hat, const SolveConfig& cfg) {
  cfg.validate();
  if (b_hat.size() != a.n_rows()) throw DimensionMismatch("right-hand side length != operator rows");
  return cfg.method == SolveMethod::NormalEquationsCG ? solve_cg(a, b_hat, cfg) : solve_lsqr(a, b_hat, cfg);
}

SolveResult reconstruct(const SparseOperator& a, const Eigen::Ref<const VectorXd>& b,
                        const Eigen::Ref<const VectorXd>& x0, const SolveConfig& cfg) {
  if (x0.size() != a.n_cols()) throw DimensionMismatch("prior length != operator columns");
  if (b.size() != a.n_rows()) throw DimensionMismatch("observation length != operator rows");
  VectorXd b_hat = b - a.matrix() * x0;
  for (Eigen::Index r = 0; r < a.n_rows(); ++r)
    if (a.row_nnz(r) == 0) b_hat[r] = 0.0;
  SolveResult res = solve_damped(a, b_hat, cfg);
  res.x += x0;
  return res;
}

double damped_objective(const SparseOperator& a, const Eigen::Ref<const VectorXd>& dx,
                        const Eigen::Ref<const VectorXd>& b_hat, double lambda) {
  return (a.matrix() * dx - b_hat).squaredNorm() + lambda * dx.squaredNorm();
}

}  // namespace polysr
