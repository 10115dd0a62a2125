#pragma once

#include <Eigen/Dense>

#include <random>

#include "dcbr/constraints.hpp"
#include "dcbr/types.hpp"

namespace dcbr::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed = 12345) {
  return std::mt19937_64(seed);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline SpatioTemporalPoint random_point(std::mt19937_64& rng, double lo = -2.0,
                                        double hi = 2.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi),
          std::abs(uniform(rng, lo, hi))};
}

inline Vector6 halfvec(const Eigen::Matrix3d& h) {
  Vector6 v;
  v << h(0, 0), h(1, 1), h(2, 2), h(0, 1), h(0, 2), h(1, 2);
  return v;
}

/// Analytic quadratic field u(x) = c0 + a . x + 0.5 x' B x over
/// x = (p1, p2, t); the test oracle for exact Taylor recovery.
struct QuadraticField {
  double c0 = 0.0;
  Vector3 a = Vector3::Zero();
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();

  static QuadraticField random(std::mt19937_64& rng, double scale = 1.0) {
    QuadraticField f;
    f.c0 = uniform(rng, -scale, scale);
    for (int i = 0; i < 3; ++i) f.a[i] = uniform(rng, -scale, scale);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = uniform(rng, -scale, scale);
    f.B = 0.5 * (m + m.transpose());
    return f;
  }

  Vector3 coords(const SpatioTemporalPoint& p) const {
    return {p.p1, p.p2, p.t};
  }
  double value(const SpatioTemporalPoint& p) const {
    const Vector3 x = coords(p);
    return c0 + a.dot(x) + 0.5 * x.dot(B * x);
  }
  Vector3 gradient(const SpatioTemporalPoint& p) const {
    return a + B * coords(p);
  }
  Vector6 hessian() const { return halfvec(B); }
};

/// Decision vector holding the true field variables of `field` at the
/// query and all neighbors, with every slack set as given (0 works for
/// quadratics).
inline Eigen::VectorXd true_theta(const QuadraticField& field,
                                  const SpatioTemporalPoint& query,
                                  std::span<const Sample> neighbors,
                                  double slack = 0.0) {
  const ThetaLayout layout(static_cast<int>(neighbors.size()));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.dim());
  theta[ThetaLayout::state_index()] = field.value(query);
  const auto fill = [&](int off, const SpatioTemporalPoint& p) {
    theta.segment<3>(off + ThetaLayout::kGradOffset) = field.gradient(p);
    theta.segment<6>(off + ThetaLayout::kHessOffset) = field.hessian();
    theta[off + ThetaLayout::kEpsGOffset] = slack;
    theta[off + ThetaLayout::kEpsQOffset] = slack;
  };
  fill(ThetaLayout::query_kappa(), query);
  for (int i = 0; i < layout.k; ++i)
    fill(layout.neighbor_kappa(i), neighbors[i].point);
  return theta;
}

inline std::vector<Sample> sample_field(const QuadraticField& field,
                                        std::mt19937_64& rng, int count,
                                        double lo = -2.0, double hi = 2.0) {
  std::vector<Sample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const SpatioTemporalPoint p = random_point(rng, lo, hi);
    out.push_back({p, field.value(p)});
  }
  return out;
}

/// Samples `count` field points uniformly within `radius` of `center`.
/// The regulariser in the prediction objective trades state accuracy
/// against derivative norms across the family of models consistent with
/// the samples; with k >= 10 neighbors the family collapses and recovery
/// is exact, while smaller k needs a tight cluster (error ~ |grad|·radius).
inline std::vector<Sample> cluster_field(const QuadraticField& field,
                                         std::mt19937_64& rng, int count,
                                         const SpatioTemporalPoint& center,
                                         double radius) {
  std::vector<Sample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const SpatioTemporalPoint p{center.p1 + uniform(rng, -radius, radius),
                                center.p2 + uniform(rng, -radius, radius),
                                center.t + uniform(rng, -radius, radius)};
    out.push_back({p, field.value(p)});
  }
  return out;
}

}  // namespace dcbr::testing
