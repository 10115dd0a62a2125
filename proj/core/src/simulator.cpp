#include "dcbr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace dcbr {
namespace {

// Right-hand side of du/dt with mirrored ghost nodes (homogeneous
// Neumann). Field layout: u[j * n + i] for node (i, j) on the (p1, p2)
// axes.
void rds_rhs(const std::vector<double>& u, std::vector<double>& du, int n,
             double h1, double h2, const RdsParams& p) {
  const double ih1 = 1.0 / (2.0 * h1), ih2 = 1.0 / (2.0 * h2);
  const double ihh1 = 1.0 / (h1 * h1), ihh2 = 1.0 / (h2 * h2);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double c = u[j * n + i];
      const double xm = u[j * n + (i > 0 ? i - 1 : 1)];
      const double xp = u[j * n + (i < n - 1 ? i + 1 : n - 2)];
      const double ym = u[(j > 0 ? j - 1 : 1) * n + i];
      const double yp = u[(j < n - 1 ? j + 1 : n - 2) * n + i];
      const double lap = (xp - 2 * c + xm) * ihh1 + (yp - 2 * c + ym) * ihh2;
      const double g1 = (xp - xm) * ih1;
      const double g2 = (yp - ym) * ih2;
      du[j * n + i] = p.nu * lap + p.alpha * c - p.beta * c * c +
                      p.w[0] * g1 + p.w[1] * g2;
    }
  }
}

}  // namespace

double SimConfig::stable_dt(const RdsParams& params) const {
  const double h = std::min(h1(), h2());
  return h * h / (4.0 * params.nu + h * params.w.norm());
}

void SimConfig::validate(const RdsParams& params) const {
  params.validate();
  if (grid_n < 2) throw std::invalid_argument("SimConfig: grid_n must be >= 2");
  if (!(hi1 > lo1) || !(hi2 > lo2))
    throw std::invalid_argument("SimConfig: empty domain");
  if (!(snapshot_dt > 0.0))
    throw std::invalid_argument("SimConfig: snapshot_dt must be > 0");
  if (horizon_k < 1)
    throw std::invalid_argument("SimConfig: horizon_k must be >= 1");
  if (dt_sim > stable_dt(params))
    throw std::invalid_argument("SimConfig: dt_sim violates the stability "
                                "bound h^2 / (4 nu + h ||w||)");
}

GroundTruth simulate(const SimConfig& cfg, const RdsParams& params) {
  cfg.validate(params);
  const int n = cfg.grid_n;
  const double h1 = cfg.h1(), h2 = cfg.h2();

  double dt = cfg.dt_sim;
  if (dt <= 0.0) dt = cfg.stable_dt(params);
  const int steps_per_snap =
      std::max(1, static_cast<int>(std::ceil(cfg.snapshot_dt / dt - 1e-12)));
  dt = cfg.snapshot_dt / steps_per_snap;

  std::vector<double> u(static_cast<std::size_t>(n) * n, cfg.ic_offset);
  for (int j = 0; j < n; ++j) {
    const double p2 = cfg.lo2 + j * h2;
    for (int i = 0; i < n; ++i) {
      const double p1 = cfg.lo1 + i * h1;
      for (const GaussianPeak& pk : cfg.ic) {
        const double d2 = (p1 - pk.c1) * (p1 - pk.c1) +
                          (p2 - pk.c2) * (p2 - pk.c2);
        u[j * n + i] += pk.amplitude *
                        std::exp(-d2 / (2.0 * pk.sigma * pk.sigma));
      }
    }
  }

  GroundTruth truth;
  truth.cfg = cfg;
  truth.snapshots.reserve(cfg.horizon_k + 1);
  const auto record = [&](int k) {
    Snapshot snap;
    snap.time_index = k;
    snap.time = k * cfg.snapshot_dt;
    snap.samples.reserve(u.size());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        snap.samples.push_back(
            {{cfg.lo1 + i * h1, cfg.lo2 + j * h2, snap.time}, u[j * n + i]});
    truth.snapshots.push_back(std::move(snap));
  };
  record(0);

  std::vector<double> k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size()),
      tmp(u.size());
  long step = 0;
  for (int k = 1; k <= cfg.horizon_k; ++k) {
    for (int s = 0; s < steps_per_snap; ++s, ++step) {
      rds_rhs(u, k1, n, h1, h2, params);
      for (std::size_t i = 0; i < u.size(); ++i)
        tmp[i] = u[i] + 0.5 * dt * k1[i];
      rds_rhs(tmp, k2, n, h1, h2, params);
      for (std::size_t i = 0; i < u.size(); ++i)
        tmp[i] = u[i] + 0.5 * dt * k2[i];
      rds_rhs(tmp, k3, n, h1, h2, params);
      for (std::size_t i = 0; i < u.size(); ++i)
        tmp[i] = u[i] + dt * k3[i];
      rds_rhs(tmp, k4, n, h1, h2, params);
      double maxabs = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        maxabs = std::max(maxabs, std::abs(u[i]));
      }
      if (!std::isfinite(maxabs) || maxabs > 1e12)
        throw std::runtime_error("simulate: blow-up at step " +
                                 std::to_string(step));
    }
    record(k);
  }
  return truth;
}

bool grid_subset_is_uniform(int grid_n, int m) {
  return m >= 2 && (grid_n - 1) % (m - 1) == 0;
}

std::vector<Snapshot> sample_grid(const GroundTruth& truth, int m) {
  const int n = truth.cfg.grid_n;
  if (m < 2 || m > n)
    throw std::invalid_argument("sample_grid: need 2 <= m <= grid_n");

  std::vector<int> idx(m);
  for (int j = 0; j < m; ++j)
    idx[j] = static_cast<int>(
        std::lround(static_cast<double>(j) * (n - 1) / (m - 1)));

  std::vector<Snapshot> out;
  out.reserve(truth.snapshots.size());
  for (const Snapshot& snap : truth.snapshots) {
    Snapshot s;
    s.time_index = snap.time_index;
    s.time = snap.time;
    s.samples.reserve(static_cast<std::size_t>(m) * m);
    for (int j : idx)
      for (int i : idx) s.samples.push_back(snap.samples[j * n + i]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Snapshot> sample_random(const GroundTruth& truth,
                                    int n_per_snapshot, std::uint64_t seed) {
  const int n = truth.cfg.grid_n;
  if (n_per_snapshot < 1)
    throw std::invalid_argument("sample_random: n_per_snapshot must be >= 1");
  if (n_per_snapshot > n * n)
    throw std::invalid_argument("sample_random: more draws than grid nodes");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d1(truth.cfg.lo1, truth.cfg.hi1);
  std::uniform_real_distribution<double> d2(truth.cfg.lo2, truth.cfg.hi2);
  const double h1 = truth.cfg.h1(), h2 = truth.cfg.h2();

  std::vector<Snapshot> out;
  out.reserve(truth.snapshots.size());
  for (const Snapshot& snap : truth.snapshots) {
    Snapshot s;
    s.time_index = snap.time_index;
    s.time = snap.time;
    std::unordered_set<int> taken;
    while (static_cast<int>(s.samples.size()) < n_per_snapshot) {
      const int i = std::clamp(
          static_cast<int>(std::lround((d1(rng) - truth.cfg.lo1) / h1)), 0,
          n - 1);
      const int j = std::clamp(
          static_cast<int>(std::lround((d2(rng) - truth.cfg.lo2) / h2)), 0,
          n - 1);
      if (!taken.insert(j * n + i).second) continue;  // snapped collision
      s.samples.push_back(snap.samples[j * n + i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace dcbr
