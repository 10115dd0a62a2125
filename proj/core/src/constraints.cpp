#include "dcbr/constraints.hpp"

#include <ostream>
#include <stdexcept>

namespace dcbr {
namespace {

constexpr int kKappa = ThetaLayout::kKappaSize;

// Writes the four-row pattern shared by both block kinds into `rows`,
// addressing two kappa blocks at column offsets off_a (the point whose
// state is being expressed, or the query) and off_b (the reference
// sample). `xi` points from b to a. Optional state column at `state_col`.
//
// Row 1:  +u_a - xi.(g_a+g_b)/2 + lam.(h_a-h_b)/12 <= rhs + slack terms,
// with the quartic remainder charged to eps_Q of b. Rows 2 negates the
// non-slack part; rows 3/4 mirror with the quartic charged to eps_Q of a.
void fill_rows(Eigen::Matrix<double, 4, Eigen::Dynamic>& rows,
               const Displacement& d, int state_col, int off_a, int off_b) {
  const double r4 = d.r * d.r * d.r * d.r;
  const double r5 = r4 * d.r;

  Eigen::RowVectorXd base = Eigen::RowVectorXd::Zero(rows.cols());
  if (state_col >= 0) base[state_col] = 1.0;
  base.segment<3>(off_a + ThetaLayout::kGradOffset) = -0.5 * d.xi.transpose();
  base.segment<6>(off_a + ThetaLayout::kHessOffset) =
      d.lambda.transpose() / 12.0;
  base.segment<3>(off_b + ThetaLayout::kGradOffset) = -0.5 * d.xi.transpose();
  base.segment<6>(off_b + ThetaLayout::kHessOffset) =
      -d.lambda.transpose() / 12.0;

  rows.row(0) = base;
  rows.row(1) = -base;
  rows.row(2) = -base;
  rows.row(3) = base;

  for (int r = 0; r < 4; ++r) {
    rows(r, off_a + ThetaLayout::kEpsGOffset) = -r5;
    rows(r, off_b + ThetaLayout::kEpsGOffset) = -r5;
  }
  // Forward rows charge the reference sample's quartic slack, backward
  // rows the expressed point's.
  rows(0, off_b + ThetaLayout::kEpsQOffset) = -r4;
  rows(1, off_b + ThetaLayout::kEpsQOffset) = -r4;
  rows(2, off_a + ThetaLayout::kEpsQOffset) = -r4;
  rows(3, off_a + ThetaLayout::kEpsQOffset) = -r4;
}

}  // namespace

ConstraintBlock query_sample_block(const SpatioTemporalPoint& query,
                                   const Sample& sample,
                                   const AxisScaling& scaling) {
  ConstraintBlock block;
  block.has_state_column = true;
  block.rows.setZero(4, 1 + 2 * kKappa);

  const Displacement d = displacement(sample.point, query, scaling);
  fill_rows(block.rows, d, /*state_col=*/0, /*off_a=*/1, /*off_b=*/1 + kKappa);
  block.rhs << sample.u, -sample.u, -sample.u, sample.u;
  return block;
}

ConstraintBlock sample_pair_block(const Sample& a, const Sample& b,
                                  const AxisScaling& scaling) {
  ConstraintBlock block;
  block.has_state_column = false;
  block.rows.setZero(4, 2 * kKappa);

  const Displacement d = displacement(b.point, a.point, scaling);
  fill_rows(block.rows, d, /*state_col=*/-1, /*off_a=*/0, /*off_b=*/kKappa);
  const double du = b.u - a.u;
  block.rhs << du, -du, -du, du;
  return block;
}

ConstraintSystem assemble(const SpatioTemporalPoint& query,
                          std::span<const Sample> neighbors,
                          const AxisScaling& scaling) {
  const int k = static_cast<int>(neighbors.size());
  if (k == 0) throw std::invalid_argument("assemble: no neighbors");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (neighbors[i].point == neighbors[j].point)
        throw std::invalid_argument(
            "assemble: duplicate neighbor points at indices " +
            std::to_string(i) + " and " + std::to_string(j));

  ConstraintSystem sys{.A = {}, .b = {}, .layout = ThetaLayout(k)};
  const int m = 4 * k + 2 * k * (k - 1);
  const int dim = sys.layout.dim();
  sys.A.setZero(m, dim);
  sys.b.resize(m);

  int row = 0;
  for (int i = 0; i < k; ++i, row += 4) {
    const ConstraintBlock blk = query_sample_block(query, neighbors[i], scaling);
    sys.A.block(row, 0, 4, 1) = blk.rows.leftCols<1>();
    sys.A.block(row, ThetaLayout::query_kappa(), 4, kKappa) =
        blk.rows.middleCols(1, kKappa);
    sys.A.block(row, sys.layout.neighbor_kappa(i), 4, kKappa) =
        blk.rows.middleCols(1 + kKappa, kKappa);
    sys.b.segment<4>(row) = blk.rhs;
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j, row += 4) {
      const ConstraintBlock blk =
          sample_pair_block(neighbors[i], neighbors[j], scaling);
      sys.A.block(row, sys.layout.neighbor_kappa(i), 4, kKappa) =
          blk.rows.leftCols(kKappa);
      sys.A.block(row, sys.layout.neighbor_kappa(j), 4, kKappa) =
          blk.rows.rightCols(kKappa);
      sys.b.segment<4>(row) = blk.rhs;
    }
  }
  return sys;
}

void dump_csv(const ConstraintSystem& system, std::ostream& out) {
  char buf[32];
  for (Eigen::Index i = 0; i < system.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < system.A.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", system.A(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", system.b[i]);
    out << buf << '\n';
  }
}

}  // namespace dcbr
