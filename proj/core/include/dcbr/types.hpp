#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dcbr {

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// A location (p1, p2, t) in the spatio-temporal domain.
struct SpatioTemporalPoint {
  double p1 = 0.0;
  double p2 = 0.0;
  double t = 0.0;

  bool operator==(const SpatioTemporalPoint&) const = default;
};

/// A point paired with the exact state value observed there.
struct Sample {
  SpatioTemporalPoint point;
  double u = 0.0;
};

/// All samples taken at one snapshot time t_k.
struct Snapshot {
  int time_index = 0;
  double time = 0.0;
  std::vector<Sample> samples;
};

/// Per-axis scale factors applied to coordinates before constraint
/// assembly. Defaults to identity; affects conditioning only, since the
/// remainder slacks absorb the space/time unit mismatch.
struct AxisScaling {
  double s1 = 1.0;
  double s2 = 1.0;
  double st = 1.0;

  void validate() const {
    if (!(s1 > 0.0) || !(s2 > 0.0) || !(st > 0.0))
      throw std::invalid_argument("AxisScaling: factors must be positive");
  }

  Vector3 apply(const SpatioTemporalPoint& x) const {
    return {s1 * x.p1, s2 * x.p2, st * x.t};
  }
};

/// Scaled displacement between two points, with the derived quantities the
/// Taylor blocks need: the Euclidean norm r and the half-vectorisation
/// lambda of xi*xi^T chosen so that lambda . h == xi^T H xi for a symmetric
/// H stored as h = (h11, h22, h33, h12, h13, h23).
struct Displacement {
  Vector3 xi = Vector3::Zero();
  double r = 0.0;
  Vector6 lambda = Vector6::Zero();
};

inline Displacement displacement(const SpatioTemporalPoint& from,
                                 const SpatioTemporalPoint& to,
                                 const AxisScaling& scaling = {}) {
  Displacement d;
  d.xi = scaling.apply(to) - scaling.apply(from);
  d.r = d.xi.norm();
  const double x1 = d.xi[0], x2 = d.xi[1], x3 = d.xi[2];
  d.lambda << x1 * x1, x2 * x2, x3 * x3, 2 * x1 * x2, 2 * x1 * x3, 2 * x2 * x3;
  return d;
}

/// Gradient, symmetric-Hessian half-vector and the two nonnegative
/// remainder slacks attached to one point. Slacks are the scaled remainder
/// magnitudes (the 1/3 quadrature constant is absorbed into them).
struct FieldVars {
  Vector3 g = Vector3::Zero();
  Vector6 h = Vector6::Zero();
  double eps_g = 0.0;
  double eps_Q = 0.0;
};

/// Index map for the decision vector theta = (u', kappa', kappa^(1) ...
/// kappa^(k)). Each kappa holds 3 gradient + 6 Hessian + 2 slack entries.
struct ThetaLayout {
  static constexpr int kKappaSize = 11;

  int k = 0;  // neighbor count

  explicit ThetaLayout(int neighbors = 0) : k(neighbors) {}

  int dim() const { return 1 + kKappaSize * (k + 1); }
  static int state_index() { return 0; }
  /// Offset of kappa' (the query block).
  static int query_kappa() { return 1; }
  /// Offset of kappa^(i), i in [0, k).
  int neighbor_kappa(int i) const {
    if (i < 0 || i >= k) throw std::out_of_range("ThetaLayout: neighbor index");
    return 1 + kKappaSize * (1 + i);
  }

  // Offsets within one kappa block.
  static constexpr int kGradOffset = 0;
  static constexpr int kHessOffset = 3;
  static constexpr int kEpsGOffset = 9;
  static constexpr int kEpsQOffset = 10;

  /// Theta indices of every slack entry (both eps_g and eps_Q, query and
  /// neighbors), in increasing order.
  std::vector<int> slack_indices() const {
    std::vector<int> idx;
    idx.reserve(2 * (k + 1));
    for (int b = 0; b <= k; ++b) {
      const int off = 1 + kKappaSize * b;
      idx.push_back(off + kEpsGOffset);
      idx.push_back(off + kEpsQOffset);
    }
    return idx;
  }

  FieldVars extract(const Eigen::VectorXd& theta, int kappa_offset) const {
    FieldVars f;
    f.g = theta.segment<3>(kappa_offset + kGradOffset);
    f.h = theta.segment<6>(kappa_offset + kHessOffset);
    f.eps_g = theta[kappa_offset + kEpsGOffset];
    f.eps_Q = theta[kappa_offset + kEpsQOffset];
    return f;
  }
};

inline bool finite(const SpatioTemporalPoint& x) {
  return std::isfinite(x.p1) && std::isfinite(x.p2) && std::isfinite(x.t);
}

}  // namespace dcbr
