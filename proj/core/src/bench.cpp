#include "dcbr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcbr {
namespace {

constexpr double kDenominatorGuard = 1e-6;

// Indices of the eval_m x eval_m scoring lattice inside one truth snapshot
// (node order matches the snapshot's row-major layout).
std::vector<std::size_t> scoring_indices(const SimConfig& cfg, int eval_m) {
  const int n = cfg.grid_n;
  const int m = (eval_m <= 0 || eval_m >= n) ? n : eval_m;
  std::vector<int> axis(m);
  for (int j = 0; j < m; ++j)
    axis[j] = static_cast<int>(
        std::lround(static_cast<double>(j) * (n - 1) / (m - 1)));
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int j : axis)
    for (int i : axis)
      out.push_back(static_cast<std::size_t>(j) * n + i);
  return out;
}

Snapshot subset(const Snapshot& snap, const std::vector<std::size_t>& idx) {
  Snapshot s;
  s.time_index = snap.time_index;
  s.time = snap.time;
  s.samples.reserve(idx.size());
  for (std::size_t i : idx) s.samples.push_back(snap.samples[i]);
  return s;
}

TimingReport finish_timing(std::vector<double>& ms, int k) {
  TimingReport t;
  t.k = k;
  t.query_count = ms.size();
  if (ms.empty()) return t;
  double sum = 0.0;
  for (double v : ms) sum += v;
  t.mean_ms = sum / ms.size();
  std::sort(ms.begin(), ms.end());
  t.median_ms = ms[ms.size() / 2];
  t.p95_ms = ms[std::min(ms.size() - 1,
                         static_cast<std::size_t>(0.95 * ms.size()))];
  return t;
}

}  // namespace

double l2_relative_error(const Snapshot& pred, const Snapshot& truth) {
  if (pred.samples.size() != truth.samples.size())
    throw std::invalid_argument("l2_relative_error: node count mismatch");
  double num = 0.0, den = kDenominatorGuard;
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    if (pred.samples[i].point != truth.samples[i].point)
      throw std::invalid_argument("l2_relative_error: node set mismatch");
    const double d = pred.samples[i].u - truth.samples[i].u;
    num += d * d;
    den += truth.samples[i].u * truth.samples[i].u;
  }
  return std::sqrt(num / den);
}

InterpolationResult run_interpolation(const GroundTruth& truth,
                                      std::span<const Snapshot> dataset,
                                      const BenchConfig& cfg) {
  const std::vector<std::size_t> idx =
      scoring_indices(truth.cfg, cfg.eval_m);
  const RdsModel model(cfg.params);

  InterpolationResult out;
  std::vector<double> all_ms;
  std::size_t failures = 0, total = 0;
  for (std::size_t k = 1; k < truth.snapshots.size(); ++k) {
    const Snapshot target = subset(truth.snapshots[k], idx);
    std::vector<SpatioTemporalPoint> queries;
    queries.reserve(target.samples.size());
    for (const Sample& s : target.samples) queries.push_back(s.point);

    GridPrediction pred = predict_points(queries, dataset, &model,
                                         cfg.predictor, target.time_index);
    out.errors.k_prime.push_back(target.time_index);
    out.errors.t.push_back(target.time);
    out.errors.error.push_back(l2_relative_error(pred.snapshot, target));
    failures += pred.degraded_count;
    total += queries.size();
    out.max_kkt = std::max(out.max_kkt, pred.max_kkt);
    all_ms.insert(all_ms.end(), pred.per_query_ms.begin(),
                  pred.per_query_ms.end());
  }
  out.timing = finish_timing(all_ms, cfg.predictor.neighbor.k);
  out.failure_fraction = total ? static_cast<double>(failures) / total : 0.0;
  return out;
}

ForecastResult run_forecast(const GroundTruth& truth,
                            std::span<const Snapshot> dataset,
                            std::span<const int> k_starts,
                            const BenchConfig& cfg) {
  const std::vector<std::size_t> idx =
      scoring_indices(truth.cfg, cfg.eval_m);
  const RdsModel model(cfg.params);
  const int k_max = static_cast<int>(truth.snapshots.size()) - 1;

  ForecastResult out;
  std::vector<double> all_ms;
  std::size_t failures = 0, total = 0;
  for (int k_start : k_starts) {
    if (k_start < 0 || k_start >= k_max)
      throw std::invalid_argument("run_forecast: k_start out of range");
    std::vector<Snapshot> visible;
    for (const Snapshot& s : dataset)
      if (s.time_index <= k_start) visible.push_back(s);

    for (int kp = k_start + 1; kp <= k_max; ++kp) {
      const Snapshot target = subset(truth.snapshots[kp], idx);
      std::vector<SpatioTemporalPoint> queries;
      queries.reserve(target.samples.size());
      for (const Sample& s : target.samples) queries.push_back(s.point);

      GridPrediction pred = predict_points(queries, visible, &model,
                                           cfg.predictor, target.time_index);
      out.cells.push_back({k_start, kp, target.time,
                           l2_relative_error(pred.snapshot, target)});
      failures += pred.degraded_count;
      total += queries.size();
      out.max_kkt = std::max(out.max_kkt, pred.max_kkt);
      all_ms.insert(all_ms.end(), pred.per_query_ms.begin(),
                    pred.per_query_ms.end());
    }
  }
  out.timing = finish_timing(all_ms, cfg.predictor.neighbor.k);
  out.failure_fraction = total ? static_cast<double>(failures) / total : 0.0;
  return out;
}

double suggest_time_scale(double domain_area, int samples_per_snapshot,
                          double snapshot_dt) {
  const double spacing =
      std::sqrt(domain_area / std::max(1, samples_per_snapshot));
  return spacing / snapshot_dt;
}

}  // namespace dcbr
