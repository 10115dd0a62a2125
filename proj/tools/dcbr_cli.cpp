// Operator entry point: binds the simulator, dataset generation, the
// per-query predictor and the benchmark harness into reproducible runs.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dcbr/bench.hpp"
#include "dcbr/config.hpp"
#include "dcbr/io.hpp"
#include "dcbr/predictor.hpp"
#include "dcbr/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<int> grid_n, horizon_k, k_neighbors, workers, eval_m;
  std::optional<double> time_scale;
  std::optional<std::uint64_t> seed;
  std::optional<bool> physics;
  std::optional<std::string> output_root;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Run configuration JSON file");
  cmd->add_option("--grid-n", f.grid_n, "Truth grid resolution per axis");
  cmd->add_option("--horizon-k", f.horizon_k, "Number of snapshot steps K");
  cmd->add_option("--k", f.k_neighbors, "Neighbors per query");
  cmd->add_option("--time-scale", f.time_scale,
                  "Time-axis weight of the neighbor metric (0 = derive)");
  cmd->add_option("--workers", f.workers, "Prediction worker threads");
  cmd->add_option("--eval-m", f.eval_m,
                  "Scoring lattice resolution (0 = full truth grid)");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_flag("--physics,!--no-physics", f.physics,
                "Toggle the PDE constraint rows");
  cmd->add_option("--output-root", f.output_root, "Results root directory");
}

dcbr::RunConfig resolve(const CommonFlags& f) {
  dcbr::RunConfig cfg;
  if (!f.config_path.empty()) cfg = dcbr::load_run_config(f.config_path);
  if (const char* env = std::getenv("DCBR_OUTPUT_ROOT"))
    cfg.output_root = env;
  if (f.grid_n) cfg.sim.grid_n = *f.grid_n;
  if (f.horizon_k) cfg.sim.horizon_k = *f.horizon_k;
  if (f.k_neighbors) cfg.k_neighbors = *f.k_neighbors;
  if (f.time_scale) cfg.time_scale = *f.time_scale;
  if (f.workers) cfg.workers = *f.workers;
  if (f.eval_m) cfg.eval_m = *f.eval_m;
  if (f.seed) cfg.seed = *f.seed;
  if (f.physics) cfg.physics = *f.physics;
  if (f.output_root) cfg.output_root = *f.output_root;
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

dcbr::GroundTruth load_truth(const fs::path& dir) {
  const dcbr::io::SnapshotDir d = dcbr::io::read_snapshot_dir(dir);
  dcbr::GroundTruth truth;
  truth.cfg = dcbr::run_config_from_json(d.config).sim;
  truth.snapshots = d.snapshots;
  return truth;
}

int samples_per_snapshot(const std::vector<dcbr::Snapshot>& data) {
  std::size_t n = 0;
  for (const auto& s : data) n = std::max(n, s.samples.size());
  return static_cast<int>(n);
}

// ---- simulate ------------------------------------------------------------

int cmd_simulate(const CommonFlags& flags, const std::string& out_dir) {
  const dcbr::RunConfig cfg = resolve(flags);
  cfg.sim.validate(cfg.params);
  const dcbr::GroundTruth truth = dcbr::simulate(cfg.sim, cfg.params);
  json meta = dcbr::to_json(cfg);
  meta["config_hash"] = dcbr::config_hash(cfg);
  dcbr::io::write_snapshot_dir(truth.snapshots, out_dir, meta, "truth");
  std::printf("wrote %zu snapshots to %s\n", truth.snapshots.size(),
              out_dir.c_str());
  return 0;
}

// ---- make-dataset ----------------------------------------------------------

int cmd_make_dataset(const CommonFlags& flags, const std::string& truth_dir,
                     const std::string& kind, int size,
                     const std::string& out_dir) {
  const dcbr::RunConfig file_cfg = resolve(flags);
  const dcbr::GroundTruth truth = load_truth(truth_dir);

  std::vector<dcbr::Snapshot> data;
  if (kind == "grid") {
    if (size < 2 || size > truth.cfg.grid_n)
      throw std::invalid_argument(
          "make-dataset: grid size must be in [2, grid_n]");
    data = dcbr::sample_grid(truth, size);
  } else if (kind == "rand") {
    if (size < 1)
      throw std::invalid_argument("make-dataset: rand size must be >= 1");
    data = dcbr::sample_random(truth, size, file_cfg.seed);
  } else {
    throw std::invalid_argument("make-dataset: kind must be grid or rand");
  }

  json meta = dcbr::to_json(file_cfg);
  meta["config_hash"] = dcbr::config_hash(file_cfg);
  meta["dataset"] = {{"kind", kind}, {"size", size}, {"seed", file_cfg.seed}};
  dcbr::io::write_snapshot_dir(data, out_dir, meta, kind);
  std::printf("wrote %s dataset (%zu snapshots, %zu samples each) to %s\n",
              kind.c_str(), data.size(),
              data.empty() ? 0 : data[0].samples.size(), out_dir.c_str());
  return 0;
}

// ---- predict ---------------------------------------------------------------

int cmd_predict(const CommonFlags& flags, const std::string& data_dir,
                const std::vector<double>& point, int grid_m, double t_query,
                const std::string& out_csv) {
  const dcbr::RunConfig cfg = resolve(flags);
  const dcbr::io::SnapshotDir d = dcbr::io::read_snapshot_dir(data_dir);
  const dcbr::PredictorConfig pcfg =
      dcbr::make_predictor_config(cfg, samples_per_snapshot(d.snapshots));
  const dcbr::RdsModel model(cfg.params);
  const dcbr::PdeModel* pde = cfg.physics ? &model : nullptr;

  if (!point.empty()) {
    if (point.size() != 3)
      throw std::invalid_argument("--point needs p1 p2 t");
    const dcbr::SpatioTemporalPoint q{point[0], point[1], point[2]};
    const dcbr::PredictionResult res =
        dcbr::predict(q, d.snapshots, pde, pcfg);
    if (res.degraded) {
      std::fprintf(stderr, "predict: solver degraded at the query point\n");
      return kExitNumerical;
    }
    const auto& fv = res.field_vars_query;
    std::printf("u'        = %s\n", dcbr::io::format_double(res.u_prime).c_str());
    std::printf("gradient  = %s %s %s\n",
                dcbr::io::format_double(fv.g[0]).c_str(),
                dcbr::io::format_double(fv.g[1]).c_str(),
                dcbr::io::format_double(fv.g[2]).c_str());
    std::printf("hessian   =");
    for (int i = 0; i < 6; ++i)
      std::printf(" %s", dcbr::io::format_double(fv.h[i]).c_str());
    std::printf("\nslacks    = %s %s (max over points: %s %s)\n",
                dcbr::io::format_double(fv.eps_g).c_str(),
                dcbr::io::format_double(fv.eps_Q).c_str(),
                dcbr::io::format_double(res.max_eps_g).c_str(),
                dcbr::io::format_double(res.max_eps_Q).c_str());
    return 0;
  }

  if (grid_m < 2)
    throw std::invalid_argument("predict: give --point or --grid-m >= 2");
  const dcbr::SimConfig& sim = cfg.sim;
  const dcbr::GridPrediction pred = dcbr::predict_grid(
      grid_m, sim.lo1, sim.hi1, sim.lo2, sim.hi2, t_query, d.snapshots, pde,
      pcfg, static_cast<int>(std::lround(t_query / sim.snapshot_dt)));

  const fs::path csv = out_csv.empty() ? fs::path("prediction.csv")
                                       : fs::path(out_csv);
  std::ofstream out(csv);
  out << "p1,p2,t,u_pred,status\n";
  for (std::size_t i = 0; i < pred.snapshot.samples.size(); ++i) {
    const auto& s = pred.snapshot.samples[i];
    out << dcbr::io::format_double(s.point.p1) << ','
        << dcbr::io::format_double(s.point.p2) << ','
        << dcbr::io::format_double(s.point.t) << ','
        << dcbr::io::format_double(s.u) << ','
        << dcbr::to_string(pred.status[i]) << '\n';
  }
  out.close();
  json side = {{"config_hash", dcbr::config_hash(cfg)},
               {"config", dcbr::to_json(cfg)},
               {"degraded_count", pred.degraded_count},
               {"query_count", pred.snapshot.samples.size()}};
  write_json(csv.string() + ".json", side);
  std::printf("wrote %s (%zu nodes, %zu degraded)\n", csv.c_str(),
              pred.snapshot.samples.size(), pred.degraded_count);
  return pred.degraded_count == pred.snapshot.samples.size() &&
                 !pred.snapshot.samples.empty()
             ? kExitNumerical
             : 0;
}

// ---- bench -----------------------------------------------------------------

json timing_json(const dcbr::TimingReport& t) {
  return {{"pre_training_s", t.pre_training_s}, {"mean_ms", t.mean_ms},
          {"median_ms", t.median_ms},           {"p95_ms", t.p95_ms},
          {"k", t.k},                           {"query_count", t.query_count}};
}

int cmd_bench(const CommonFlags& flags, const std::string& truth_dir,
              const std::string& data_dir, const std::string& mode,
              const std::vector<int>& k_starts) {
  const dcbr::RunConfig cfg = resolve(flags);
  const dcbr::GroundTruth truth = load_truth(truth_dir);
  const dcbr::io::SnapshotDir d = dcbr::io::read_snapshot_dir(data_dir);

  dcbr::BenchConfig bcfg;
  bcfg.params = cfg.params;
  bcfg.predictor =
      dcbr::make_predictor_config(cfg, samples_per_snapshot(d.snapshots));
  bcfg.eval_m = cfg.eval_m;

  const std::string hash = dcbr::config_hash(cfg);
  const fs::path run_dir =
      fs::path(cfg.output_root) / (mode + "-" + hash.substr(0, 12));
  fs::create_directories(run_dir);

  json meta = dcbr::to_json(cfg);
  meta["config_hash"] = hash;
  meta["mode"] = mode;
  write_json(run_dir / "config.json", meta);

  if (mode == "interp") {
    const dcbr::InterpolationResult r =
        dcbr::run_interpolation(truth, d.snapshots, bcfg);
    std::ofstream out(run_dir / "errors_interp.csv");
    out << "k_prime,t,error\n";
    for (std::size_t i = 0; i < r.errors.error.size(); ++i)
      out << r.errors.k_prime[i] << ','
          << dcbr::io::format_double(r.errors.t[i]) << ','
          << dcbr::io::format_double(r.errors.error[i]) << '\n';
    json t = timing_json(r.timing);
    t["failure_fraction"] = r.failure_fraction;
    write_json(run_dir / "timing.json", t);
  } else if (mode == "forecast") {
    if (k_starts.empty())
      throw std::invalid_argument("bench: forecast needs --k-start");
    const dcbr::ForecastResult r =
        dcbr::run_forecast(truth, d.snapshots, k_starts, bcfg);
    std::ofstream out(run_dir / "errors_forecast.csv");
    out << "k_prime,t,error,k_start\n";
    for (const auto& c : r.cells)
      out << c.k_prime << ',' << dcbr::io::format_double(c.t) << ','
          << dcbr::io::format_double(c.error) << ',' << c.k_start << '\n';
    json t = timing_json(r.timing);
    t["failure_fraction"] = r.failure_fraction;
    write_json(run_dir / "timing.json", t);
  } else {
    throw std::invalid_argument("bench: mode must be interp or forecast");
  }
  std::printf("results in %s\n", run_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free physics-informed field prediction"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string out_dir = "truth", truth_dir, data_dir, kind, mode = "interp";
  std::string out_csv;
  int size = 10, grid_m = 0;
  double t_query = 0.0;
  std::vector<double> point;
  std::vector<int> k_starts;

  CLI::App* sim = app.add_subcommand("simulate", "Simulate ground truth");
  add_common(sim, flags);
  sim->add_option("--out", out_dir, "Output directory");

  CLI::App* mk = app.add_subcommand("make-dataset", "Sample a dataset");
  add_common(mk, flags);
  mk->add_option("--truth", truth_dir, "Ground-truth directory")->required();
  mk->add_option("--kind", kind, "grid or rand")->required();
  mk->add_option("--size", size, "Grid resolution or draws per snapshot")
      ->required();
  mk->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* pr = app.add_subcommand("predict", "Predict points or a grid");
  add_common(pr, flags);
  pr->add_option("--data", data_dir, "Dataset directory")->required();
  pr->add_option("--point", point, "Query point: p1 p2 t")->expected(3);
  pr->add_option("--grid-m", grid_m, "Predict an m x m lattice");
  pr->add_option("--time", t_query, "Query time for --grid-m");
  pr->add_option("--out", out_csv, "CSV output path for --grid-m");

  CLI::App* be = app.add_subcommand("bench", "Run a benchmark experiment");
  add_common(be, flags);
  be->add_option("--truth", truth_dir, "Ground-truth directory")->required();
  be->add_option("--data", data_dir, "Dataset directory")->required();
  be->add_option("--mode", mode, "interp or forecast");
  be->add_option("--k-start", k_starts, "Forecast initial-condition indices");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(flags, out_dir);
    if (mk->parsed())
      return cmd_make_dataset(flags, truth_dir, kind, size, out_dir);
    if (pr->parsed())
      return cmd_predict(flags, data_dir, point, grid_m, t_query, out_csv);
    if (be->parsed())
      return cmd_bench(flags, truth_dir, data_dir, mode, k_starts);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
