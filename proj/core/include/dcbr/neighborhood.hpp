#pragma once

#include <span>
#include <vector>

#include "dcbr/types.hpp"

namespace dcbr {

/// Neighbor selection settings. The metric scaling weighs the time axis
/// against space when ranking candidates; by default one snapshot interval
/// counts as one typical spatial sample spacing.
struct NeighborConfig {
  int k = 10;
  AxisScaling metric;

  void validate() const {
    if (k < 4)
      throw std::invalid_argument("NeighborConfig: k must be at least 4");
    metric.validate();
  }
};

struct NeighborSelection {
  std::vector<Sample> samples;
  std::vector<std::size_t> ids;  // flat insertion index into `data`
  bool undersized = false;       // fewer than k samples were available
};

/// k nearest samples under the scaled Euclidean spatio-temporal metric.
/// Ties are broken by (t, p1, p2, insertion index); the output is sorted by
/// distance then tie-break key, so the result is deterministic and
/// independent of the snapshot ordering.
NeighborSelection select_neighbors(const SpatioTemporalPoint& query,
                                   std::span<const Snapshot> data,
                                   const NeighborConfig& cfg);

}  // namespace dcbr
