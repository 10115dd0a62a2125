#pragma once

#include <span>
#include <vector>

#include "dcbr/predictor.hpp"
#include "dcbr/simulator.hpp"

namespace dcbr {

/// Per-snapshot L2 relative errors.
struct ErrorCurve {
  std::vector<int> k_prime;
  std::vector<double> t;
  std::vector<double> error;
};

/// Table 1 style timing split. Pre-training is identically zero for this
/// method; per-query statistics come from the wall time of each predict.
struct TimingReport {
  double pre_training_s = 0.0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  int k = 0;
  std::size_t query_count = 0;
};

struct BenchConfig {
  PredictorConfig predictor;
  RdsParams params;
  /// Per-axis resolution of the scoring lattice, a uniform node subset of
  /// the ground-truth lattice; 0 scores on the full truth grid.
  int eval_m = 0;
};

/// Discretised L2 relative error between two snapshots on the same node
/// set: sqrt(sum (u_pred - u_true)^2 / (sum u_true^2 + 1e-6)). The
/// denominator guard and truth-only normalisation follow the benchmark
/// metric exactly. Throws on node-set mismatch.
double l2_relative_error(const Snapshot& pred, const Snapshot& truth);

struct InterpolationResult {
  ErrorCurve errors;
  TimingReport timing;
  double failure_fraction = 0.0;
  /// Worst KKT residual over all queries that reported optimal.
  double max_kkt = 0.0;
};

/// Spatial interpolation test: with all dataset snapshots available,
/// predict every truth snapshot k' in {1..K} on the scoring lattice.
InterpolationResult run_interpolation(const GroundTruth& truth,
                                      std::span<const Snapshot> dataset,
                                      const BenchConfig& cfg);

struct ForecastCell {
  int k_start = 0;
  int k_prime = 0;
  double t = 0.0;
  double error = 0.0;
};

struct ForecastResult {
  std::vector<ForecastCell> cells;
  TimingReport timing;
  double failure_fraction = 0.0;
  /// Worst KKT residual over all queries that reported optimal.
  double max_kkt = 0.0;
};

/// State forecast test: for each initial-condition index k in k_starts,
/// restrict the dataset to snapshots 0..k and predict snapshots k+1..K.
ForecastResult run_forecast(const GroundTruth& truth,
                            std::span<const Snapshot> dataset,
                            std::span<const int> k_starts,
                            const BenchConfig& cfg);

/// Default time-axis metric weight tying one snapshot interval to one
/// typical spatial sample spacing.
double suggest_time_scale(double domain_area, int samples_per_snapshot,
                          double snapshot_dt);

}  // namespace dcbr
