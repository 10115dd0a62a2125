#pragma once

#include <cstdint>
#include <vector>

#include "dcbr/physics.hpp"
#include "dcbr/types.hpp"

namespace dcbr {

struct GaussianPeak {
  double c1 = 0.0;
  double c2 = 0.0;
  double amplitude = 1.0;
  double sigma = 1.0;
};

/// Simulation settings. The default initial condition is three Gaussian
/// peaks that expand and merge under the default RDS coefficients.
struct SimConfig {
  int grid_n = 120;
  double lo1 = 0.0, hi1 = 10.0;
  double lo2 = 0.0, hi2 = 10.0;
  double dt_sim = 0.0;      // 0 picks the largest stable step
  double snapshot_dt = 0.1;
  int horizon_k = 25;       // snapshots G(0)..G(K)
  double ic_offset = 0.0;
  std::vector<GaussianPeak> ic = {{2.5, 2.5, 40.0, 0.6},
                                  {7.0, 3.5, 30.0, 0.6},
                                  {4.0, 7.5, 35.0, 0.6}};

  double h1() const { return (hi1 - lo1) / (grid_n - 1); }
  double h2() const { return (hi2 - lo2) / (grid_n - 1); }

  /// Explicit-scheme stability bound dt <= h^2 / (4 nu + h ||w||).
  double stable_dt(const RdsParams& params) const;
  void validate(const RdsParams& params) const;
};

/// Full-grid snapshots of the simulated field at times t_k = k *
/// snapshot_dt.
struct GroundTruth {
  SimConfig cfg;
  std::vector<Snapshot> snapshots;
};

/// Explicit solver for the reaction-diffusion PDE: 5-point Laplacian,
/// centered advection, homogeneous Neumann boundaries, classic 4-stage
/// Runge-Kutta in time. Throws std::runtime_error on blow-up, reporting
/// the offending step index.
GroundTruth simulate(const SimConfig& cfg, const RdsParams& params);

/// Uniform m x m node subset of each truth snapshot (no interpolation;
/// emitted values are bit-equal to the truth values). When (grid_n - 1) is
/// not divisible by (m - 1) the nearest nodes are used; see
/// grid_subset_is_uniform.
std::vector<Snapshot> sample_grid(const GroundTruth& truth, int m);

bool grid_subset_is_uniform(int grid_n, int m);

/// n uniform spatial draws per snapshot, snapped to the nearest truth node
/// and deduplicated within the snapshot. Seeded and reproducible.
std::vector<Snapshot> sample_random(const GroundTruth& truth,
                                    int n_per_snapshot, std::uint64_t seed);

}  // namespace dcbr
