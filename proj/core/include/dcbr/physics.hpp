#pragma once

#include <Eigen/Dense>

#include "dcbr/types.hpp"

namespace dcbr {

/// Field-variable vector omega = (g1, g2, g3, h11, h22, h33, h12, h13, h23)
/// over which PDE constraints are written.
using OmegaVector = Eigen::Matrix<double, 9, 1>;

/// Linear equality row c . omega = rhs imposed at a sample, where the state
/// value is known.
struct SampleEqualityRow {
  OmegaVector omega = OmegaVector::Zero();
  double rhs = 0.0;
};

/// PDE residual at the query and its gradient with respect to
/// (u', omega').
struct QueryResidual {
  double value = 0.0;
  double d_state = 0.0;
  OmegaVector d_omega = OmegaVector::Zero();
};

/// A scalar PDE enforced on the field variables. Implementations must keep
/// sample_equality and query_residual mutually consistent: substituting a
/// known state u into the query residual and collecting the omega terms
/// must reproduce the sample row.
class PdeModel {
 public:
  virtual ~PdeModel() = default;
  virtual SampleEqualityRow sample_equality(double u_i) const = 0;
  virtual QueryResidual query_residual(double u_prime,
                                       const OmegaVector& omega) const = 0;
  /// True when the query residual is linear in (u', omega').
  virtual bool linear() const = 0;
};

/// Reaction-diffusion coefficients: dt u = nu lap(u) + alpha u - beta u^2
/// + w . grad(u).
struct RdsParams {
  double nu = 0.02;
  double alpha = 1.0;
  double beta = 0.008;
  Eigen::Vector2d w{0.1, -0.06};

  void validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("RdsParams: nu must be > 0");
  }
};

/// The benchmark reaction-diffusion system. The only nonlinearity is the
/// -beta u'^2 reaction term at the query.
class RdsModel final : public PdeModel {
 public:
  explicit RdsModel(RdsParams params) : p_(params) { p_.validate(); }

  SampleEqualityRow sample_equality(double u_i) const override {
    SampleEqualityRow row;
    row.omega << -p_.w[0], -p_.w[1], 1.0, -p_.nu, -p_.nu, 0, 0, 0, 0;
    row.rhs = p_.alpha * u_i - p_.beta * u_i * u_i;
    return row;
  }

  QueryResidual query_residual(double u_prime,
                               const OmegaVector& omega) const override {
    QueryResidual res;
    res.value = p_.nu * (omega[3] + omega[4]) + p_.alpha * u_prime -
                p_.beta * u_prime * u_prime + p_.w[0] * omega[0] +
                p_.w[1] * omega[1] - omega[2];
    res.d_state = p_.alpha - 2.0 * p_.beta * u_prime;
    res.d_omega << p_.w[0], p_.w[1], -1.0, p_.nu, p_.nu, 0, 0, 0, 0;
    return res;
  }

  bool linear() const override { return p_.beta == 0.0; }

  const RdsParams& params() const { return p_; }

 private:
  RdsParams p_;
};

/// Generic linear scalar PDE c_state u + c_omega . omega = c0, handy for
/// exactness tests (heat, advection, manufactured fields).
class LinearScalarPde final : public PdeModel {
 public:
  LinearScalarPde(double c_state, const OmegaVector& c_omega, double c0 = 0.0)
      : c_state_(c_state), c_omega_(c_omega), c0_(c0) {}

  SampleEqualityRow sample_equality(double u_i) const override {
    return {c_omega_, c0_ - c_state_ * u_i};
  }

  QueryResidual query_residual(double u_prime,
                               const OmegaVector& omega) const override {
    QueryResidual res;
    res.value = c_state_ * u_prime + c_omega_.dot(omega) - c0_;
    res.d_state = c_state_;
    res.d_omega = c_omega_;
    return res;
  }

  bool linear() const override { return true; }

 private:
  double c_state_;
  OmegaVector c_omega_;
  double c0_;
};

/// Chain-rule factors mapping a physical-derivative omega row onto the
/// scaled-coordinate derivatives the constraint system estimates when a
/// non-identity assembly scaling is in use.
inline OmegaVector omega_scale_factors(const AxisScaling& s) {
  OmegaVector f;
  f << s.s1, s.s2, s.st, s.s1 * s.s1, s.s2 * s.s2, s.st * s.st, s.s1 * s.s2,
      s.s1 * s.st, s.s2 * s.st;
  return f;
}

}  // namespace dcbr
