#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcbr/neighborhood.hpp"
#include "dcbr/solver.hpp"

namespace dcbr {

struct PredictorConfig {
  NeighborConfig neighbor;
  AxisScaling assembly;  // coordinate scaling for constraint assembly
  bool physics = true;
  DcbrOptions solver;
  double init_slack = 1e-3;
  int workers = 1;  // 0 picks the hardware concurrency
};

struct PredictionResult {
  double u_prime = 0.0;
  FieldVars field_vars_query;
  std::vector<FieldVars> field_vars_neighbors;
  double max_eps_g = 0.0;
  double max_eps_Q = 0.0;
  SolveReport report;
  std::vector<std::size_t> neighbor_ids;
  bool degraded = false;    // solver failed; u_prime is the IDW fallback
  bool undersized = false;  // fewer than k samples were available
};

/// Full per-query pipeline: neighbor selection, Taylor constraint
/// assembly, PDE rows, and the constrained solve. Stateless; there is no
/// training phase and nothing is cached across calls.
PredictionResult predict(const SpatioTemporalPoint& query,
                         std::span<const Snapshot> data, const PdeModel* pde,
                         const PredictorConfig& cfg);

struct GridPrediction {
  Snapshot snapshot;                // predicted values, node order preserved
  std::vector<SolveStatus> status;  // per node
  std::vector<std::uint8_t> degraded;
  std::vector<double> per_query_ms;
  std::size_t degraded_count = 0;
  /// Worst KKT residual over queries whose solve reported optimal.
  double max_kkt = 0.0;
};

/// One predict per query point, distributed over a bounded worker pool.
/// Output is deterministic and independent of the worker count.
GridPrediction predict_points(std::span<const SpatioTemporalPoint> queries,
                              std::span<const Snapshot> data,
                              const PdeModel* pde, const PredictorConfig& cfg,
                              int time_index = 0);

/// Uniform m x m spatial lattice over [lo, hi]^2 at time t_query.
GridPrediction predict_grid(int m, double lo1, double hi1, double lo2,
                            double hi2, double t_query,
                            std::span<const Snapshot> data, const PdeModel* pde,
                            const PredictorConfig& cfg, int time_index = 0);

}  // namespace dcbr
