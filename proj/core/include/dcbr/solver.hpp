#pragma once

#include <span>

#include "dcbr/constraints.hpp"
#include "dcbr/physics.hpp"
#include "dcbr/qp.hpp"

namespace dcbr {

struct DcbrOptions {
  double rho = 1e-9;          // Tikhonov weight on all of theta
  double qp_tol = 1e-8;
  int qp_max_iter = 200;
  int max_outer = 30;
  double merit_penalty = 1e3;
  double step_tol = 1e-9;     // outer stop on damped step norm
  double residual_tol = 1e-9; // outer stop on |nonlinear residual|
  AxisScaling scaling;        // must match the scaling used for assembly
};

/// Builds the slack-penalised QP over the assembled system: objective
/// sum(eps^2) + rho theta'theta, the Taylor inequalities, nonnegative
/// slacks, and one linear PDE equality per neighbor sample.
QpProblem build_qp(const ConstraintSystem& system, const PdeModel* pde,
                   std::span<const Sample> neighbors, const DcbrOptions& opts);

/// Physical-derivative omega at a kappa block of theta, undoing the
/// assembly coordinate scaling.
OmegaVector extract_omega(const Eigen::VectorXd& theta, int kappa_offset,
                          const AxisScaling& scaling);

/// Solves the full per-query program. The nonlinear query equality is
/// handled by successive linearisation: each outer step linearises the
/// residual at the iterate, solves the QP, and damps the step by
/// backtracking on an L1 merit function. Linear PDEs collapse to a single
/// QP solve. Passing pde == nullptr disables the physics rows entirely
/// (pure Taylor set-membership regression).
SolveReport solve_dcbr(const ConstraintSystem& system, const PdeModel* pde,
                       std::span<const Sample> neighbors,
                       const Eigen::VectorXd& init, const DcbrOptions& opts);

}  // namespace dcbr
