#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>

#include "dcbr/types.hpp"

namespace dcbr {

/// One four-row inequality block. Columns are laid out as
/// [state | kappa_first | kappa_second] for query-sample blocks and
/// [kappa_first | kappa_second] for sample-pair blocks. Rows 1/2 and 3/4
/// negate each other on non-slack columns; slack coefficients are <= 0.
struct ConstraintBlock {
  Eigen::Matrix<double, 4, Eigen::Dynamic> rows;
  Eigen::Vector4d rhs;
  bool has_state_column = false;

  int cols() const { return static_cast<int>(rows.cols()); }
};

/// Aggregated inequality system A theta <= b over the full decision vector.
struct ConstraintSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ThetaLayout layout;
};

/// Two-sided Taylor consistency between the query point and one sample:
/// forward expansion about the sample (quartic remainder charged to the
/// sample's eps_Q) and backward expansion about the query (charged to the
/// query's eps_Q). Valid for coincident points, where it collapses to
/// u' = u_i.
ConstraintBlock query_sample_block(const SpatioTemporalPoint& query,
                                   const Sample& sample,
                                   const AxisScaling& scaling = {});

/// Cross-consistency between two samples; same structure as the
/// query-sample block but with both state values known, so the block has
/// no state column and the rhs carries u_j - u_i.
ConstraintBlock sample_pair_block(const Sample& a, const Sample& b,
                                  const AxisScaling& scaling = {});

/// Stacks all query-sample blocks (by neighbor index) followed by all
/// sample-pair blocks (lexicographic i < j) into one system with
/// m = 4k + 2k(k-1) rows. Throws std::invalid_argument on duplicate
/// neighbor points.
ConstraintSystem assemble(const SpatioTemporalPoint& query,
                          std::span<const Sample> neighbors,
                          const AxisScaling& scaling = {});

/// Debug dump of (A, b) as CSV, one row per constraint, b in the last
/// column. Row order matches assemble().
void dump_csv(const ConstraintSystem& system, std::ostream& out);

}  // namespace dcbr
