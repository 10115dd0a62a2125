// Microbenchmarks for the per-query pipeline: constraint assembly, the
// QP solve and the full predict call at representative neighbor counts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dcbr/constraints.hpp"
#include "dcbr/predictor.hpp"
#include "dcbr/solver.hpp"

namespace {

using namespace dcbr;

struct Setup {
  SpatioTemporalPoint query{5.0, 5.0, 1.05};
  std::vector<Sample> neighbors;
  std::vector<Snapshot> data;

  explicit Setup(int k) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Snapshot snap;
    for (int i = 0; i < std::max(k, 32); ++i) {
      const SpatioTemporalPoint p{query.p1 + u(rng), query.p2 + u(rng),
                                  query.t + 0.1 * u(rng)};
      const double val = 1.0 + 0.5 * p.p1 - 0.25 * p.p2 + 0.1 * p.t +
                         0.05 * p.p1 * p.p2;
      if (i < k) neighbors.push_back({p, val});
      snap.samples.push_back({p, val});
    }
    data.push_back(std::move(snap));
  }
};

void BM_assemble(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble(s.query, s.neighbors));
}
BENCHMARK(BM_assemble)->Arg(8)->Arg(12)->Arg(15);

void BM_solve_dcbr(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  const RdsModel model{RdsParams{}};
  const ConstraintSystem sys = assemble(s.query, s.neighbors);
  Eigen::VectorXd init = Eigen::VectorXd::Zero(sys.layout.dim());
  for (int j : sys.layout.slack_indices()) init[j] = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_dcbr(sys, &model, s.neighbors, init, {}));
}
BENCHMARK(BM_solve_dcbr)->Arg(8)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_predict(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  const RdsModel model{RdsParams{}};
  PredictorConfig cfg;
  cfg.neighbor.k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(predict(s.query, s.data, &model, cfg));
}
BENCHMARK(BM_predict)->Arg(8)->Arg(12)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
