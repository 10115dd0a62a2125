#include "dcbr/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dcbr {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const int n = dim();
  if (hessian_diag.minCoeff() <= 0.0)
    throw std::invalid_argument("QpProblem: Hessian must be strictly positive");
  if (linear.size() != n) throw std::invalid_argument("QpProblem: linear size");
  if (A_ineq.rows() != b_ineq.size() || (A_ineq.size() && A_ineq.cols() != n))
    throw std::invalid_argument("QpProblem: inequality shape");
  if (A_eq.rows() != b_eq.size() || (A_eq.size() && A_eq.cols() != n))
    throw std::invalid_argument("QpProblem: equality shape");
  for (int j : nonneg)
    if (j < 0 || j >= n)
      throw std::invalid_argument("QpProblem: nonneg index out of range");
}

namespace {

// Largest alpha in (0, 1] keeping v + alpha * dv >= (1 - frac) * v.
double step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                   double frac = 0.995) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -frac * v[i] / dv[i]);
  return alpha;
}

// Lawson-Hanson nonnegative least squares: min ||A x - b||, x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double tol) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<int> pidx;
  const int max_outer = 3 * n + 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    int j_best = -1;
    double w_best = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > w_best) {
        w_best = w[j];
        j_best = j;
      }
    if (j_best < 0) break;
    passive[j_best] = true;
    pidx.push_back(j_best);
    // Inner loop: least squares on the passive set, backtracking any
    // variables that would go negative.
    for (int inner = 0; inner < max_outer; ++inner) {
      Eigen::MatrixXd Ap(A.rows(), pidx.size());
      for (size_t c = 0; c < pidx.size(); ++c) Ap.col(c) = A.col(pidx[c]);
      const Eigen::VectorXd zp =
          Ap.completeOrthogonalDecomposition().solve(b);
      double alpha = 1.0;
      for (size_t c = 0; c < pidx.size(); ++c)
        if (zp[c] <= 0.0) {
          const double xi = x[pidx[c]];
          alpha = std::min(alpha, xi / (xi - zp[c]));
        }
      if (alpha >= 1.0) {
        for (size_t c = 0; c < pidx.size(); ++c) x[pidx[c]] = zp[c];
        break;
      }
      for (size_t c = 0; c < pidx.size(); ++c)
        x[pidx[c]] += alpha * (zp[c] - x[pidx[c]]);
      for (size_t c = 0; c < pidx.size();) {
        if (x[pidx[c]] <= 1e-14) {
          x[pidx[c]] = 0.0;
          passive[pidx[c]] = false;
          pidx.erase(pidx.begin() + static_cast<long>(c));
        } else {
          ++c;
        }
      }
      if (pidx.empty()) break;
    }
  }
  return x;
}

struct KktResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;

  double worst() const {
    return std::max({stationarity, feasibility, complementarity});
  }
};

}  // namespace

SolveReport solve_qp(const QpProblem& p, const QpOptions& opts) {
  p.validate();
  const int n = p.dim();
  const int m_rows = static_cast<int>(p.A_ineq.rows());
  const int m_bnd = static_cast<int>(p.nonneg.size());
  const int mi = m_rows + m_bnd;
  const int me = static_cast<int>(p.A_eq.rows());

  // Stack explicit inequalities and the nonneg bounds (-theta_j <= 0).
  Eigen::MatrixXd G(mi, n);
  Eigen::VectorXd h(mi);
  G.topRows(m_rows) = p.A_ineq;
  h.head(m_rows) = p.b_ineq;
  G.bottomRows(m_bnd).setZero();
  for (int i = 0; i < m_bnd; ++i) G(m_rows + i, p.nonneg[i]) = -1.0;
  h.tail(m_bnd).setZero();

  // Ruiz equilibration: rows and columns of the constraint stack (and the
  // Hessian diagonal) are rescaled toward unit infinity norm. Taylor
  // blocks mix O(1) state coefficients with O(r^5) slack weights, which
  // is hopeless for the Newton systems otherwise. All loop state lives in
  // the scaled space; residuals and outputs are reported unscaled.
  Eigen::VectorXd dc = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd dr = Eigen::VectorXd::Ones(mi);
  Eigen::VectorXd de = Eigen::VectorXd::Ones(me);
  Eigen::MatrixXd Aeq_s = p.A_eq;
  Eigen::VectorXd Hs = p.hessian_diag;
  for (int pass = 0; pass < 4; ++pass) {
    for (int i = 0; i < mi; ++i) {
      const double m = G.row(i).cwiseAbs().maxCoeff();
      if (m > 0.0) {
        const double f = 1.0 / std::sqrt(m);
        G.row(i) *= f;
        dr[i] *= f;
      }
    }
    for (int i = 0; i < me; ++i) {
      const double m = Aeq_s.row(i).cwiseAbs().maxCoeff();
      if (m > 0.0) {
        const double f = 1.0 / std::sqrt(m);
        Aeq_s.row(i) *= f;
        de[i] *= f;
      }
    }
    for (int j = 0; j < n; ++j) {
      double m = std::sqrt(Hs[j]);
      if (mi) m = std::max(m, G.col(j).cwiseAbs().maxCoeff());
      if (me) m = std::max(m, Aeq_s.col(j).cwiseAbs().maxCoeff());
      if (m > 0.0) {
        const double f = 1.0 / std::sqrt(m);
        if (mi) G.col(j) *= f;
        if (me) Aeq_s.col(j) *= f;
        Hs[j] *= f * f;
        dc[j] *= f;
      }
    }
  }
  h = dr.cwiseProduct(h);
  const Eigen::VectorXd beq_s = de.cwiseProduct(p.b_eq);
  const Eigen::VectorXd cs = dc.cwiseProduct(p.linear);

  Eigen::VectorXd x = opts.x0.size() == n
                          ? opts.x0.cwiseQuotient(dc).eval()
                          : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd s(mi), z(mi);
  {
    const Eigen::VectorXd slack0 = h - G * x;
    for (int i = 0; i < mi; ++i) s[i] = std::max(1.0, slack0[i]);
    z.setConstant(1.0);
  }

  const auto objective = [&](const Eigen::VectorXd& v) {
    return 0.5 * v.dot(p.hessian_diag.cwiseProduct(v)) + p.linear.dot(v);
  };
  // KKT residuals of the *original* problem at unscaled (x, y, z).
  const auto kkt = [&](const Eigen::VectorXd& vx, const Eigen::VectorXd& vy,
                       const Eigen::VectorXd& vz) {
    KktResiduals r;
    Eigen::VectorXd stat = p.hessian_diag.cwiseProduct(vx) + p.linear;
    if (m_rows) stat += p.A_ineq.transpose() * vz.head(m_rows);
    for (int i = 0; i < m_bnd; ++i) stat[p.nonneg[i]] -= vz[m_rows + i];
    if (me) stat += p.A_eq.transpose() * vy;
    r.stationarity = stat.lpNorm<Eigen::Infinity>();
    Eigen::VectorXd viol(mi);
    if (m_rows) viol.head(m_rows) = p.A_ineq * vx - p.b_ineq;
    for (int i = 0; i < m_bnd; ++i) viol[m_rows + i] = -vx[p.nonneg[i]];
    r.feasibility = mi ? std::max(0.0, viol.maxCoeff()) : 0.0;
    if (me)
      r.feasibility = std::max(
          r.feasibility, (p.A_eq * vx - p.b_eq).lpNorm<Eigen::Infinity>());
    r.complementarity =
        mi ? vz.cwiseProduct(viol).cwiseAbs().maxCoeff() : 0.0;
    return r;
  };

  SolveReport best;
  best.theta = dc.cwiseProduct(x);
  best.status = SolveStatus::max_iter;
  // Iterates within tolerance are ranked by the barrier parameter, the
  // rest by their worst KKT residual.
  double best_worst = std::numeric_limits<double>::infinity();
  double best_mu = std::numeric_limits<double>::infinity();
  const auto record = [&](const KktResiduals& r, double mu, int iters,
                          const Eigen::VectorXd& vx, const Eigen::VectorXd& vy,
                          const Eigen::VectorXd& vz) {
    const bool certified = r.worst() <= opts.tol && mu <= opts.tol;
    const bool best_certified = best_worst <= opts.tol && best_mu <= opts.tol;
    const bool better = certified ? (!best_certified || mu < best_mu)
                                  : (!best_certified && r.worst() < best_worst);
    if (better) {
      best_worst = r.worst();
      best_mu = mu;
      best.theta = vx;
      best.objective = objective(vx);
      best.kkt_stationarity = r.stationarity;
      best.kkt_feasibility = r.feasibility;
      best.kkt_complementarity = r.complementarity;
      best.inner_iterations = iters;
      best.ineq_multipliers = vz;
      best.eq_multipliers = vy;
    }
  };

  // Handle the no-inequality case via the same loop; mu is then 0.
  Eigen::MatrixXd kkt_mat(n + me, n + me);
  Eigen::VectorXd rhs(n + me), sol(n + me);
  int iter = 0;
  double mu_prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  double last_dual_scale = 0.0;

  for (iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd r_d =
        Hs.cwiseProduct(x) + cs +
        (mi ? (G.transpose() * z).eval() : Eigen::VectorXd::Zero(n)) +
        (me ? (Aeq_s.transpose() * y).eval() : Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd r_p = me ? (Aeq_s * x - beq_s).eval()
                                   : Eigen::VectorXd();
    const Eigen::VectorXd r_g = mi ? (G * x + s - h).eval() : Eigen::VectorXd();
    const double mu = mi ? s.dot(z) / mi : 0.0;

    const Eigen::VectorXd x_o = dc.cwiseProduct(x);
    const Eigen::VectorXd z_o = dr.cwiseProduct(z);
    const Eigen::VectorXd y_o = de.cwiseProduct(y);
    last_dual_scale = mi ? z_o.lpNorm<Eigen::Infinity>() : 0.0;
    const KktResiduals res = kkt(x_o, y_o, z_o);
    record(res, mu, iter - 1, x_o, y_o, z_o);
    if (res.worst() <= opts.tol && mu <= opts.tol) {
      best.status = SolveStatus::optimal;
      if (mu <= opts.mu_floor) break;
    }
    // Stop when the barrier parameter no longer makes progress.
    if (mu >= 0.95 * mu_prev) {
      if (++stall >= 15) break;
    } else {
      stall = 0;
    }
    mu_prev = mu;

    // Reduced KKT matrix [[H + G' W G, A_eq'], [A_eq, 0]], W = diag(z / s).
    const Eigen::VectorXd w = z.cwiseQuotient(s);
    kkt_mat.setZero();
    kkt_mat.topLeftCorner(n, n) = Hs.asDiagonal();
    if (mi)
      kkt_mat.topLeftCorner(n, n).noalias() +=
          G.transpose() * w.asDiagonal() * G;
    if (me) {
      kkt_mat.topRightCorner(n, me) = Aeq_s.transpose();
      kkt_mat.bottomLeftCorner(me, n) = Aeq_s;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt_mat);

    const auto newton_step = [&](const Eigen::VectorXd& rsz,
                                 Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                                 Eigen::VectorXd& ds, Eigen::VectorXd& dz) {
      rhs.head(n) = -r_d;
      if (mi)
        rhs.head(n) += G.transpose() *
                       ((rsz - z.cwiseProduct(r_g)).cwiseQuotient(s));
      if (me) rhs.tail(me) = -r_p;
      sol = lu.solve(rhs);
      // One refinement pass against the same matrix.
      sol += lu.solve(rhs - kkt_mat * sol);
      dx = sol.head(n);
      dy = sol.tail(me);
      if (mi) {
        ds = -r_g - G * dx;
        dz = (-rsz - z.cwiseProduct(ds)).cwiseQuotient(s);
      }
    };

    Eigen::VectorXd dx, dy, ds, dz;
    // Predictor (affine scaling) step.
    newton_step(s.cwiseProduct(z), dx, dy, ds, dz);
    if (!dx.allFinite()) {
      if (best.status != SolveStatus::optimal)
        best.status = SolveStatus::numerical_failure;
      break;
    }

    double sigma_mu = 0.0;
    if (mi) {
      const double a_p = step_length(s, ds, 1.0);
      const double a_d = step_length(z, dz, 1.0);
      const double mu_aff =
          (s + a_p * ds).dot(z + a_d * dz) / static_cast<double>(mi);
      const double sigma = std::pow(mu_aff / mu, 3);
      sigma_mu = sigma * mu;
      // Corrector with Mehrotra's second-order term.
      Eigen::VectorXd rsz =
          s.cwiseProduct(z) + ds.cwiseProduct(dz) -
          Eigen::VectorXd::Constant(mi, sigma_mu);
      newton_step(rsz, dx, dy, ds, dz);
      if (!dx.allFinite()) {
        if (best.status != SolveStatus::optimal)
          best.status = SolveStatus::numerical_failure;
        break;
      }
    }

    // Step closer to the boundary as mu shrinks (standard Mehrotra
    // practice); a fixed 0.995 would cap the final convergence rate.
    const double frac = std::min(0.99999, std::max(0.995, 1.0 - 100.0 * mu));
    const double a_p = mi ? step_length(s, ds, frac) : 1.0;
    const double a_d = mi ? step_length(z, dz, frac) : 1.0;
    x += a_p * dx;
    if (me) y += a_d * dy;
    if (mi) {
      s += a_p * ds;
      z += a_d * dz;
    }
  }

  // Crossover polish: interior-point iterates leave weakly-active
  // variables at O(sqrt(mu)). Guess the active set from the final
  // slack/multiplier split and solve the equality-constrained QP; the
  // primal point is unique, so only feasibility drives exchanges.
  // Multipliers are then recovered by nonnegative least squares, which
  // sidesteps the sign ambiguity of dependent paired rows.
  // The loop breaks before applying a non-finite step, so the last
  // iterate is usable for classification even after a numerical failure.
  if (mi && s.allFinite() && z.allFinite()) {
    std::vector<bool> active(mi);
    for (int i = 0; i < mi; ++i) active[i] = s[i] <= z[i];
    for (int pass = 0; pass < 8; ++pass) {
      std::vector<int> act;
      for (int i = 0; i < mi; ++i)
        if (active[i]) act.push_back(i);
      const int na = static_cast<int>(act.size());
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + na + me, n + na + me);
      Eigen::VectorXd r = Eigen::VectorXd::Zero(n + na + me);
      M.topLeftCorner(n, n) = Hs.asDiagonal();
      r.head(n) = -cs;
      for (int a = 0; a < na; ++a) {
        M.block(n + a, 0, 1, n) = G.row(act[a]);
        M.block(0, n + a, n, 1) = G.row(act[a]).transpose();
        r[n + a] = h[act[a]];
      }
      if (me) {
        M.bottomLeftCorner(me, n) = Aeq_s;
        M.topRightCorner(n, me) = Aeq_s.transpose();
        r.tail(me) = beq_s;
      }
      // Active rows may be linearly dependent (paired Taylor rows share
      // support); the least-squares solution still has the unique x.
      const Eigen::VectorXd sol_c =
          M.completeOrthogonalDecomposition().solve(r);
      const Eigen::VectorXd xc = sol_c.head(n);
      if (!xc.allFinite()) break;

      const Eigen::VectorXd violc = G * xc - h;
      bool added = false;
      for (int i = 0; i < mi; ++i)
        if (!active[i] && violc[i] > 1e-11) {
          active[i] = true;
          added = true;
        }
      if (added) continue;

      // Primal feasible: recover multipliers. Equality multipliers are
      // free, so project them out of the stationarity residual first.
      const Eigen::VectorXd r_st = -(Hs.cwiseProduct(xc) + cs);
      Eigen::MatrixXd B(n, na);
      for (int a = 0; a < na; ++a) B.col(a) = G.row(act[a]).transpose();
      Eigen::VectorXd zc = Eigen::VectorXd::Zero(mi);
      Eigen::VectorXd yc = Eigen::VectorXd::Zero(me);
      if (me) {
        const Eigen::MatrixXd E = Aeq_s.transpose();
        const auto cod = E.completeOrthogonalDecomposition();
        const Eigen::MatrixXd PB = B - E * cod.solve(B).eval();
        const Eigen::VectorXd pr = r_st - E * cod.solve(r_st).eval();
        const Eigen::VectorXd za = nnls(PB, pr, 1e-11);
        for (int a = 0; a < na; ++a) zc[act[a]] = za[a];
        yc = cod.solve(r_st - B * za);
      } else {
        const Eigen::VectorXd za = nnls(B, r_st, 1e-11);
        for (int a = 0; a < na; ++a) zc[act[a]] = za[a];
      }

      const Eigen::VectorXd x_o = dc.cwiseProduct(xc);
      const Eigen::VectorXd z_o = dr.cwiseProduct(zc);
      Eigen::VectorXd y_o = de.cwiseProduct(yc);
      if (me) {
        // Refit the equality multipliers against the original-space
        // stationarity residual; the scaled fit loses a digit or two.
        Eigen::VectorXd g_o = p.hessian_diag.cwiseProduct(x_o) + p.linear;
        if (m_rows) g_o += p.A_ineq.transpose() * z_o.head(m_rows);
        for (int i = 0; i < m_bnd; ++i) g_o[p.nonneg[i]] -= z_o[m_rows + i];
        y_o = p.A_eq.transpose()
                  .completeOrthogonalDecomposition()
                  .solve(-g_o);
      }
      const KktResiduals resc = kkt(x_o, y_o, z_o);
      record(resc, 0.0, best.inner_iterations, x_o, y_o, z_o);
      if (resc.worst() <= opts.tol) best.status = SolveStatus::optimal;
      break;
    }
  }

  if (best.status == SolveStatus::max_iter) {
    // Disambiguate genuine infeasibility from slow convergence: duals
    // blowing up while primal infeasibility persists is the Farkas
    // signature.
    if (best.kkt_feasibility > std::sqrt(opts.tol) && last_dual_scale > 1e8)
      best.status = SolveStatus::infeasible;
  }
  if (best.status == SolveStatus::optimal) best.inner_iterations = iter;
  return best;
}

}  // namespace dcbr
