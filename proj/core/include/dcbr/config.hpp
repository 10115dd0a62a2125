#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

#include "dcbr/bench.hpp"
#include "dcbr/predictor.hpp"
#include "dcbr/simulator.hpp"

namespace dcbr {

/// Merged run configuration: simulation, PDE coefficients, neighbor
/// selection, solver tolerances, reproducibility knobs and paths. Fully
/// serialisable; the hash of the canonical JSON form is embedded in every
/// output.
struct RunConfig {
  SimConfig sim;
  RdsParams params;

  int k_neighbors = 10;
  /// Time-axis weight of the neighbor metric; 0 derives it from the data
  /// set (one snapshot interval ~ one spatial sample spacing).
  double time_scale = 0.0;
  AxisScaling assembly;
  bool physics = true;

  double rho = 1e-9;
  double qp_tol = 1e-8;
  int max_outer = 30;

  std::uint64_t seed = 0;
  int workers = 1;
  int eval_m = 0;  // scoring lattice resolution; 0 = full truth grid
  std::string output_root = "results";
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

std::string config_hash(const RunConfig& cfg);

/// Resolves the per-query predictor settings: fills in the data-derived
/// time scale when the config asks for it.
PredictorConfig make_predictor_config(const RunConfig& cfg,
                                      int samples_per_snapshot);

}  // namespace dcbr
