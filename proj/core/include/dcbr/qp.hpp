#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dcbr {

enum class SolveStatus { optimal, max_iter, infeasible, numerical_failure };

std::string to_string(SolveStatus s);

/// Strictly convex QP
///   min 0.5 theta' diag(hessian_diag) theta + linear' theta
///   s.t. A_ineq theta <= b_ineq, A_eq theta = b_eq,
///        theta[j] >= 0 for j in nonneg.
struct QpProblem {
  Eigen::VectorXd hessian_diag;
  Eigen::VectorXd linear;
  Eigen::MatrixXd A_ineq;
  Eigen::VectorXd b_ineq;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  std::vector<int> nonneg;

  int dim() const { return static_cast<int>(hessian_diag.size()); }
  void validate() const;
};

struct SolveReport {
  Eigen::VectorXd theta;
  double objective = 0.0;
  double kkt_stationarity = 0.0;
  double kkt_feasibility = 0.0;
  double kkt_complementarity = 0.0;
  int inner_iterations = 0;
  int outer_iterations = 0;
  SolveStatus status = SolveStatus::numerical_failure;
  /// Multipliers for the A_ineq rows followed by the nonneg bounds.
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
  /// Filled by the SQP wrapper.
  double nonlinear_residual = 0.0;
  std::vector<double> merit_history;
};

struct QpOptions {
  double tol = 1e-8;
  int max_iter = 200;
  /// Barrier target kept well below tol: iterations continue past the
  /// optimality certificate while progress lasts, which pins weakly active
  /// variables (whose magnitude scales like sqrt(mu)) far more tightly.
  double mu_floor = 1e-13;
  /// Optional primal start; zero vector when empty.
  Eigen::VectorXd x0;
};

/// Dense primal-dual interior-point (Mehrotra predictor-corrector) solver.
/// status == optimal guarantees all three KKT residuals <= tol.
SolveReport solve_qp(const QpProblem& p, const QpOptions& opts = {});

}  // namespace dcbr
