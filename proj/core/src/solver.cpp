#include "dcbr/solver.hpp"

#include <algorithm>
#include <cmath>

namespace dcbr {
namespace {

// Linearised query equality grad . theta = grad . theta0 - value.
struct EqualityRow {
  Eigen::VectorXd coeffs;
  double rhs;
};

EqualityRow linearise_query(const PdeModel& pde, const Eigen::VectorXd& theta,
                            const ThetaLayout& layout,
                            const AxisScaling& scaling) {
  const OmegaVector factors = omega_scale_factors(scaling);
  const OmegaVector omega =
      factors.cwiseProduct(theta.segment<9>(ThetaLayout::query_kappa()));
  const QueryResidual res =
      pde.query_residual(theta[ThetaLayout::state_index()], omega);

  EqualityRow row;
  row.coeffs = Eigen::VectorXd::Zero(layout.dim());
  row.coeffs[ThetaLayout::state_index()] = res.d_state;
  row.coeffs.segment<9>(ThetaLayout::query_kappa()) =
      res.d_omega.cwiseProduct(factors);
  row.rhs = row.coeffs.dot(theta) - res.value;
  return row;
}

double query_residual_value(const PdeModel& pde, const Eigen::VectorXd& theta,
                            const AxisScaling& scaling) {
  const OmegaVector factors = omega_scale_factors(scaling);
  const OmegaVector omega =
      factors.cwiseProduct(theta.segment<9>(ThetaLayout::query_kappa()));
  return pde.query_residual(theta[ThetaLayout::state_index()], omega).value;
}

// L1 merit: objective plus penalised total infeasibility (nonlinear
// residual and any violation of the fixed linear constraints).
double merit(const QpProblem& qp, const Eigen::VectorXd& theta,
             double nonlinear_residual, double penalty) {
  double infeas = std::abs(nonlinear_residual);
  if (qp.A_ineq.rows())
    infeas += std::max(0.0, (qp.A_ineq * theta - qp.b_ineq).maxCoeff());
  for (int j : qp.nonneg) infeas += std::max(0.0, -theta[j]);
  if (qp.A_eq.rows())
    infeas += (qp.A_eq * theta - qp.b_eq).lpNorm<Eigen::Infinity>();
  const double obj =
      0.5 * theta.dot(qp.hessian_diag.cwiseProduct(theta)) +
      qp.linear.dot(theta);
  return obj + penalty * infeas;
}

}  // namespace

OmegaVector extract_omega(const Eigen::VectorXd& theta, int kappa_offset,
                          const AxisScaling& scaling) {
  return omega_scale_factors(scaling).cwiseProduct(
      theta.segment<9>(kappa_offset));
}

QpProblem build_qp(const ConstraintSystem& system, const PdeModel* pde,
                   std::span<const Sample> neighbors,
                   const DcbrOptions& opts) {
  const ThetaLayout& layout = system.layout;
  const int dim = layout.dim();

  QpProblem qp;
  qp.hessian_diag = Eigen::VectorXd::Constant(dim, 2.0 * opts.rho);
  qp.nonneg = layout.slack_indices();
  for (int j : qp.nonneg) qp.hessian_diag[j] += 2.0;
  qp.linear = Eigen::VectorXd::Zero(dim);
  qp.A_ineq = system.A;
  qp.b_ineq = system.b;

  if (pde) {
    const OmegaVector factors = omega_scale_factors(opts.scaling);
    const int k = static_cast<int>(neighbors.size());
    qp.A_eq.setZero(k, dim);
    qp.b_eq.resize(k);
    for (int i = 0; i < k; ++i) {
      const SampleEqualityRow row = pde->sample_equality(neighbors[i].u);
      qp.A_eq.row(i).segment<9>(layout.neighbor_kappa(i)) =
          row.omega.cwiseProduct(factors).transpose();
      qp.b_eq[i] = row.rhs;
    }
  } else {
    qp.A_eq.resize(0, dim);
    qp.b_eq.resize(0);
  }
  return qp;
}

SolveReport solve_dcbr(const ConstraintSystem& system, const PdeModel* pde,
                       std::span<const Sample> neighbors,
                       const Eigen::VectorXd& init, const DcbrOptions& opts) {
  const QpProblem base = build_qp(system, pde, neighbors, opts);
  const int dim = system.layout.dim();
  Eigen::VectorXd theta =
      init.size() == dim ? init : Eigen::VectorXd::Zero(dim);

  QpOptions qp_opts;
  qp_opts.tol = opts.qp_tol;
  qp_opts.max_iter = opts.qp_max_iter;

  if (!pde) {
    qp_opts.x0 = theta;
    return solve_qp(base, qp_opts);
  }

  const auto solve_linearised = [&](const Eigen::VectorXd& at,
                                    const Eigen::VectorXd& x0) {
    QpProblem qp = base;
    const EqualityRow row =
        linearise_query(*pde, at, system.layout, opts.scaling);
    const Eigen::Index k_eq = base.A_eq.rows();
    qp.A_eq.conservativeResize(k_eq + 1, dim);
    qp.A_eq.row(k_eq) = row.coeffs.transpose();
    qp.b_eq.conservativeResize(k_eq + 1);
    qp.b_eq[k_eq] = row.rhs;
    QpOptions o = qp_opts;
    o.x0 = x0;
    return solve_qp(qp, o);
  };

  if (pde->linear()) {
    // Linearisation is exact: a single QP solve is the full solution.
    SolveReport report = solve_linearised(theta, theta);
    report.outer_iterations = 1;
    report.nonlinear_residual =
        query_residual_value(*pde, report.theta, opts.scaling);
    return report;
  }

  SolveReport report;
  std::vector<double> merit_history;
  bool theta_is_qp_solution = false;
  bool converged = false;
  bool stalled = false;
  int outer = 0;
  for (outer = 1; outer <= opts.max_outer; ++outer) {
    report = solve_linearised(theta, theta);
    if (report.status == SolveStatus::infeasible ||
        report.status == SolveStatus::numerical_failure) {
      report.theta = theta;
      report.outer_iterations = outer;
      report.nonlinear_residual =
          query_residual_value(*pde, theta, opts.scaling);
      report.merit_history = std::move(merit_history);
      return report;
    }

    const Eigen::VectorXd step = report.theta - theta;
    const double current = merit(
        base, theta, query_residual_value(*pde, theta, opts.scaling),
        opts.merit_penalty);

    double gamma = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    for (int bt = 0; bt < 24; ++bt, gamma *= 0.5) {
      candidate = theta + gamma * step;
      const double m = merit(
          base, candidate,
          query_residual_value(*pde, candidate, opts.scaling),
          opts.merit_penalty);
      if (m <= current) {
        accepted = true;
        merit_history.push_back(m);
        break;
      }
    }
    if (!accepted) {  // merit cannot decrease: stop at the current iterate
      stalled = true;
      break;
    }

    theta = candidate;
    theta_is_qp_solution = (gamma == 1.0);
    const double residual = query_residual_value(*pde, theta, opts.scaling);
    if (gamma * step.lpNorm<Eigen::Infinity>() <= opts.step_tol ||
        std::abs(residual) <= opts.residual_tol) {
      converged = true;
      break;
    }
  }

  if (!theta_is_qp_solution && !stalled) {
    // Re-anchor the report on the damped iterate so the returned KKT
    // residuals certify the theta we hand back.
    report = solve_linearised(theta, theta);
    theta = report.theta;
  } else {
    report.theta = theta;
  }
  report.outer_iterations = std::min(outer, opts.max_outer);
  if (!converged && report.status == SolveStatus::optimal)
    report.status = SolveStatus::max_iter;
  report.nonlinear_residual =
      query_residual_value(*pde, theta, opts.scaling);
  report.merit_history = std::move(merit_history);
  return report;
}

}  // namespace dcbr
