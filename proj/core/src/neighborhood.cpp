#include "dcbr/neighborhood.hpp"

#include <algorithm>
#include <numeric>

namespace dcbr {
namespace {

struct Candidate {
  double dist2;
  double t, p1, p2;
  std::size_t id;

  bool operator<(const Candidate& o) const {
    if (dist2 != o.dist2) return dist2 < o.dist2;
    if (t != o.t) return t < o.t;
    if (p1 != o.p1) return p1 < o.p1;
    if (p2 != o.p2) return p2 < o.p2;
    return id < o.id;
  }
};

}  // namespace

NeighborSelection select_neighbors(const SpatioTemporalPoint& query,
                                   std::span<const Snapshot> data,
                                   const NeighborConfig& cfg) {
  cfg.validate();
  const Vector3 q = cfg.metric.apply(query);

  std::vector<Candidate> candidates;
  std::vector<const Sample*> flat;
  std::size_t id = 0;
  for (const Snapshot& snap : data) {
    for (const Sample& s : snap.samples) {
      const Vector3 p = cfg.metric.apply(s.point);
      candidates.push_back(
          {(p - q).squaredNorm(), s.point.t, s.point.p1, s.point.p2, id++});
      flat.push_back(&s);
    }
  }

  NeighborSelection out;
  const std::size_t k = static_cast<std::size_t>(cfg.k);
  if (candidates.size() <= k) {
    out.undersized = candidates.size() < k;
    std::sort(candidates.begin(), candidates.end());
  } else {
    std::nth_element(candidates.begin(), candidates.begin() + k - 1,
                     candidates.end());
    candidates.resize(k);
    std::sort(candidates.begin(), candidates.end());
  }
  out.samples.reserve(candidates.size());
  out.ids.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    out.samples.push_back(*flat[c.id]);
    out.ids.push_back(c.id);
  }
  return out;
}

}  // namespace dcbr
