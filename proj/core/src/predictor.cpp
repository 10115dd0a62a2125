#include "dcbr/predictor.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dcbr {
namespace {

double idw_estimate(const SpatioTemporalPoint& query,
                    std::span<const Sample> neighbors,
                    const AxisScaling& metric) {
  double wsum = 0.0, usum = 0.0;
  for (const Sample& s : neighbors) {
    const double d2 =
        (metric.apply(s.point) - metric.apply(query)).squaredNorm();
    const double w = 1.0 / (d2 + 1e-12);
    wsum += w;
    usum += w * s.u;
  }
  return usum / wsum;
}

}  // namespace

PredictionResult predict(const SpatioTemporalPoint& query,
                         std::span<const Snapshot> data, const PdeModel* pde,
                         const PredictorConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("predict: empty data set");
  if (!finite(query)) throw std::invalid_argument("predict: non-finite query");

  PredictionResult out;
  const NeighborSelection sel = select_neighbors(query, data, cfg.neighbor);
  out.neighbor_ids = sel.ids;
  out.undersized = sel.undersized;

  const ConstraintSystem system = assemble(query, sel.samples, cfg.assembly);
  const ThetaLayout& layout = system.layout;

  const double idw = idw_estimate(query, sel.samples, cfg.neighbor.metric);
  Eigen::VectorXd init = Eigen::VectorXd::Zero(layout.dim());
  init[ThetaLayout::state_index()] = idw;
  for (int j : layout.slack_indices()) init[j] = cfg.init_slack;

  DcbrOptions solver_opts = cfg.solver;
  solver_opts.scaling = cfg.assembly;
  out.report = solve_dcbr(system, cfg.physics ? pde : nullptr, sel.samples,
                          init, solver_opts);

  const Eigen::VectorXd& theta = out.report.theta;
  out.u_prime = theta[ThetaLayout::state_index()];
  out.field_vars_query = layout.extract(theta, ThetaLayout::query_kappa());
  out.field_vars_neighbors.reserve(sel.samples.size());
  for (int i = 0; i < layout.k; ++i)
    out.field_vars_neighbors.push_back(
        layout.extract(theta, layout.neighbor_kappa(i)));

  out.max_eps_g = out.field_vars_query.eps_g;
  out.max_eps_Q = out.field_vars_query.eps_Q;
  for (const FieldVars& f : out.field_vars_neighbors) {
    out.max_eps_g = std::max(out.max_eps_g, f.eps_g);
    out.max_eps_Q = std::max(out.max_eps_Q, f.eps_Q);
  }

  const bool failed = out.report.status == SolveStatus::infeasible ||
                      out.report.status == SolveStatus::numerical_failure ||
                      !std::isfinite(out.u_prime);
  if (failed) {
    out.u_prime = idw;
    out.degraded = true;
  }
  return out;
}

GridPrediction predict_points(std::span<const SpatioTemporalPoint> queries,
                              std::span<const Snapshot> data,
                              const PdeModel* pde, const PredictorConfig& cfg,
                              int time_index) {
  const std::size_t n = queries.size();
  GridPrediction out;
  out.snapshot.time_index = time_index;
  out.snapshot.time = n ? queries[0].t : 0.0;
  out.snapshot.samples.resize(n);
  out.status.resize(n, SolveStatus::numerical_failure);
  out.degraded.resize(n, 0);
  out.per_query_ms.resize(n, 0.0);
  std::vector<double> kkt(n, 0.0);

  int workers = cfg.workers;
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n ? n : 1)));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const auto t0 = std::chrono::steady_clock::now();
      const PredictionResult res = predict(queries[i], data, pde, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      out.snapshot.samples[i] = {queries[i], res.u_prime};
      out.status[i] = res.report.status;
      out.degraded[i] = res.degraded ? 1 : 0;
      out.per_query_ms[i] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (res.report.status == SolveStatus::optimal)
        kkt[i] = std::max({res.report.kkt_stationarity,
                           res.report.kkt_feasibility,
                           res.report.kkt_complementarity});
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::uint8_t d : out.degraded) out.degraded_count += d;
  for (double v : kkt) out.max_kkt = std::max(out.max_kkt, v);
  return out;
}

GridPrediction predict_grid(int m, double lo1, double hi1, double lo2,
                            double hi2, double t_query,
                            std::span<const Snapshot> data, const PdeModel* pde,
                            const PredictorConfig& cfg, int time_index) {
  if (m < 2) throw std::invalid_argument("predict_grid: m must be >= 2");
  std::vector<SpatioTemporalPoint> queries;
  queries.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const double p2 = lo2 + (hi2 - lo2) * j / (m - 1);
    for (int i = 0; i < m; ++i) {
      const double p1 = lo1 + (hi1 - lo1) * i / (m - 1);
      queries.push_back({p1, p2, t_query});
    }
  }
  return predict_points(queries, data, pde, cfg, time_index);
}

}  // namespace dcbr
