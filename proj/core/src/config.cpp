#include "dcbr/config.hpp"

#include <fstream>

#include "dcbr/io.hpp"

namespace dcbr {
namespace {

nlohmann::json sim_to_json(const SimConfig& s) {
  nlohmann::json peaks = nlohmann::json::array();
  for (const GaussianPeak& p : s.ic)
    peaks.push_back({{"c1", p.c1},
                     {"c2", p.c2},
                     {"amplitude", p.amplitude},
                     {"sigma", p.sigma}});
  return {{"grid_n", s.grid_n},   {"lo1", s.lo1},
          {"hi1", s.hi1},         {"lo2", s.lo2},
          {"hi2", s.hi2},         {"dt_sim", s.dt_sim},
          {"snapshot_dt", s.snapshot_dt},
          {"horizon_k", s.horizon_k},
          {"ic_offset", s.ic_offset},
          {"ic", peaks}};
}

SimConfig sim_from_json(const nlohmann::json& j) {
  SimConfig s;
  s.grid_n = j.value("grid_n", s.grid_n);
  s.lo1 = j.value("lo1", s.lo1);
  s.hi1 = j.value("hi1", s.hi1);
  s.lo2 = j.value("lo2", s.lo2);
  s.hi2 = j.value("hi2", s.hi2);
  s.dt_sim = j.value("dt_sim", s.dt_sim);
  s.snapshot_dt = j.value("snapshot_dt", s.snapshot_dt);
  s.horizon_k = j.value("horizon_k", s.horizon_k);
  s.ic_offset = j.value("ic_offset", s.ic_offset);
  if (j.contains("ic")) {
    s.ic.clear();
    for (const auto& p : j.at("ic"))
      s.ic.push_back({p.value("c1", 0.0), p.value("c2", 0.0),
                      p.value("amplitude", 1.0), p.value("sigma", 1.0)});
  }
  return s;
}

}  // namespace

nlohmann::json to_json(const RunConfig& cfg) {
  return {{"sim", sim_to_json(cfg.sim)},
          {"params",
           {{"nu", cfg.params.nu},
            {"alpha", cfg.params.alpha},
            {"beta", cfg.params.beta},
            {"w", {cfg.params.w[0], cfg.params.w[1]}}}},
          {"k_neighbors", cfg.k_neighbors},
          {"time_scale", cfg.time_scale},
          {"assembly",
           {{"s1", cfg.assembly.s1},
            {"s2", cfg.assembly.s2},
            {"st", cfg.assembly.st}}},
          {"physics", cfg.physics},
          {"rho", cfg.rho},
          {"qp_tol", cfg.qp_tol},
          {"max_outer", cfg.max_outer},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"eval_m", cfg.eval_m},
          {"output_root", cfg.output_root}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("sim")) cfg.sim = sim_from_json(j.at("sim"));
  if (j.contains("params")) {
    const auto& p = j.at("params");
    cfg.params.nu = p.value("nu", cfg.params.nu);
    cfg.params.alpha = p.value("alpha", cfg.params.alpha);
    cfg.params.beta = p.value("beta", cfg.params.beta);
    if (p.contains("w")) {
      cfg.params.w[0] = p.at("w").at(0).get<double>();
      cfg.params.w[1] = p.at("w").at(1).get<double>();
    }
  }
  cfg.k_neighbors = j.value("k_neighbors", cfg.k_neighbors);
  cfg.time_scale = j.value("time_scale", cfg.time_scale);
  if (j.contains("assembly")) {
    const auto& a = j.at("assembly");
    cfg.assembly.s1 = a.value("s1", 1.0);
    cfg.assembly.s2 = a.value("s2", 1.0);
    cfg.assembly.st = a.value("st", 1.0);
  }
  cfg.physics = j.value("physics", cfg.physics);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.qp_tol = j.value("qp_tol", cfg.qp_tol);
  cfg.max_outer = j.value("max_outer", cfg.max_outer);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.eval_m = j.value("eval_m", cfg.eval_m);
  cfg.output_root = j.value("output_root", cfg.output_root);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config " + path.string());
  return run_config_from_json(nlohmann::json::parse(in));
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  return io::format_checksum(io::fnv1a(dump.data(), dump.size()));
}

PredictorConfig make_predictor_config(const RunConfig& cfg,
                                      int samples_per_snapshot) {
  PredictorConfig p;
  p.neighbor.k = cfg.k_neighbors;
  p.neighbor.metric.st =
      cfg.time_scale > 0.0
          ? cfg.time_scale
          : suggest_time_scale((cfg.sim.hi1 - cfg.sim.lo1) *
                                   (cfg.sim.hi2 - cfg.sim.lo2),
                               samples_per_snapshot, cfg.sim.snapshot_dt);
  p.assembly = cfg.assembly;
  p.physics = cfg.physics;
  p.solver.rho = cfg.rho;
  p.solver.qp_tol = cfg.qp_tol;
  p.solver.max_outer = cfg.max_outer;
  p.workers = cfg.workers;
  return p;
}

}  // namespace dcbr
