#include "vibelsd/lsd.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <queue>

namespace vibelsd {

namespace {

using MinHeap =
    std::priority_queue<std::pair<std::uint32_t, std::uint32_t>,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>>,
                        std::greater<>>;

struct Cluster {
  std::vector<std::uint32_t> detectors;   // global detector ids
  std::vector<std::uint32_t> mechanisms;  // global mechanism ids, reliability order
  IncrementalElimination elim;
  MinHeap frontier;  // (reliability rank, mechanism)
  bool alive = true;
  bool valid = false;
};

struct Forest {
  const SparseBinaryMatrix& h;
  const BitVector& s;
  const std::vector<std::uint32_t>& rank;  // mechanism -> reliability rank
  std::vector<std::unique_ptr<Cluster>> clusters;
  std::vector<std::int64_t> det_cluster;  // detector -> owning cluster slot, -1 if none
  std::vector<std::uint32_t> det_local;   // detector -> local row in its cluster
  std::vector<std::int64_t> mech_cluster; // mechanism -> owning cluster slot, -1 if none

  Forest(const SparseBinaryMatrix& h_, const BitVector& s_,
         const std::vector<std::uint32_t>& rank_)
      : h(h_), s(s_), rank(rank_), det_cluster(h_.rows, -1), det_local(h_.rows, 0),
        mech_cluster(h_.cols, -1) {}

  BitVector local_syndrome(const Cluster& c) const {
    BitVector ls(c.detectors.size());
    for (std::size_t k = 0; k < c.detectors.size(); ++k)
      if (s.get(c.detectors[k])) ls.set(k, true);
    return ls;
  }

  void refresh_validity(Cluster& c) { c.valid = c.elim.valid_for(local_syndrome(c)); }

  void attach_detector(Cluster& c, std::size_t slot, std::uint32_t det) {
    const std::uint32_t local = c.elim.add_row();
    c.detectors.push_back(det);
    det_cluster[det] = static_cast<std::int64_t>(slot);
    det_local[det] = local;
    for (std::uint32_t mech : h.row_adjacency[det]) c.frontier.emplace(rank[mech], mech);
  }

  // Adds mechanism `mech` (and any detectors it touches) to cluster `slot`.
  // Precondition: every detector of `mech` is unowned or owned by `slot`.
  void attach_mechanism(Cluster& c, std::size_t slot, std::uint32_t mech) {
    for (std::uint32_t det : h.col_adjacency[mech])
      if (det_cluster[det] < 0) attach_detector(c, slot, det);
    std::vector<std::uint32_t> local_rows;
    local_rows.reserve(h.col_adjacency[mech].size());
    for (std::uint32_t det : h.col_adjacency[mech]) local_rows.push_back(det_local[det]);
    c.elim.add_column(mech, local_rows);
    c.mechanisms.push_back(mech);
    mech_cluster[mech] = static_cast<std::int64_t>(slot);
  }

  // Merges cluster `other` into `slot` by rebuilding: fresh local row ids in
  // ascending detector order, columns re-added in reliability order.
  void merge_into(std::size_t slot, std::size_t other) {
    Cluster& a = *clusters[slot];
    Cluster& b = *clusters[other];
    std::vector<std::uint32_t> dets = a.detectors;
    dets.insert(dets.end(), b.detectors.begin(), b.detectors.end());
    std::sort(dets.begin(), dets.end());
    std::vector<std::uint32_t> mechs = a.mechanisms;
    mechs.insert(mechs.end(), b.mechanisms.begin(), b.mechanisms.end());
    std::sort(mechs.begin(), mechs.end(),
              [this](std::uint32_t x, std::uint32_t y) { return rank[x] < rank[y]; });

    auto merged = std::make_unique<Cluster>();
    while (!b.frontier.empty()) {
      merged->frontier.push(b.frontier.top());
      b.frontier.pop();
    }
    while (!a.frontier.empty()) {
      merged->frontier.push(a.frontier.top());
      a.frontier.pop();
    }
    b.alive = false;
    clusters[slot] = std::move(merged);
    Cluster& c = *clusters[slot];
    for (std::uint32_t det : dets) {
      const std::uint32_t local = c.elim.add_row();
      c.detectors.push_back(det);
      det_cluster[det] = static_cast<std::int64_t>(slot);
      det_local[det] = local;
    }
    for (std::uint32_t mech : mechs) {
      std::vector<std::uint32_t> local_rows;
      for (std::uint32_t det : h.col_adjacency[mech]) local_rows.push_back(det_local[det]);
      c.elim.add_column(mech, local_rows);
      c.mechanisms.push_back(mech);
      mech_cluster[mech] = static_cast<std::int64_t>(slot);
    }
  }

  // One growth step.  Returns false when the frontier is exhausted while
  // the cluster is still invalid (caller escalates to the global solve).
  bool grow(std::size_t slot) {
    Cluster* c = clusters[slot].get();
    std::uint32_t mech = 0;
    for (;;) {
      if (c->frontier.empty()) return false;
      mech = c->frontier.top().second;
      c->frontier.pop();
      if (mech_cluster[mech] != static_cast<std::int64_t>(slot)) break;
    }
    // Merge with every cluster already owning this mechanism or one of its
    // detectors.
    for (;;) {
      std::int64_t foreign = mech_cluster[mech];
      if (foreign < 0) {
        for (std::uint32_t det : h.col_adjacency[mech]) {
          const std::int64_t owner = det_cluster[det];
          if (owner >= 0 && owner != static_cast<std::int64_t>(slot)) {
            foreign = owner;
            break;
          }
        }
      }
      if (foreign < 0 || foreign == static_cast<std::int64_t>(slot)) break;
      const std::size_t keep = std::min(slot, static_cast<std::size_t>(foreign));
      const std::size_t drop = std::max(slot, static_cast<std::size_t>(foreign));
      merge_into(keep, drop);
      slot = keep;
      c = clusters[slot].get();
    }
    if (mech_cluster[mech] < 0) attach_mechanism(*c, slot, mech);
    refresh_validity(*c);
    return true;
  }
};

}  // namespace

LsdResult lsd0_decode(const SparseBinaryMatrix& H, const BitVector& s,
                      std::span<const double> soft) {
  if (s.length() != H.rows || soft.size() != H.cols)
    throw std::invalid_argument("lsd0_decode dimension mismatch");

  // Reliability ranking: ascending soft score, ties by mechanism index.
  std::vector<std::uint32_t> order(H.cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&soft](std::uint32_t a, std::uint32_t b) { return soft[a] < soft[b]; });
  std::vector<std::uint32_t> rank(H.cols);
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = static_cast<std::uint32_t>(k);

  LsdResult res;
  res.estimate = BitVector(H.cols);
  const std::vector<std::uint32_t> activated = s.support();
  if (activated.empty()) return res;

  Forest forest(H, s, rank);
  for (std::uint32_t det : activated) {
    auto cluster = std::make_unique<Cluster>();
    forest.clusters.push_back(std::move(cluster));
    forest.attach_detector(*forest.clusters.back(), forest.clusters.size() - 1, det);
    forest.refresh_validity(*forest.clusters.back());
  }

  // Round-robin growth over invalid clusters in seed order.
  bool exhausted = false;
  for (;;) {
    bool any_invalid = false;
    for (std::size_t slot = 0; slot < forest.clusters.size() && !exhausted; ++slot) {
      Cluster* c = forest.clusters[slot].get();
      if (!c->alive || c->valid) continue;
      any_invalid = true;
      if (!forest.grow(slot)) exhausted = true;
    }
    if (exhausted || !any_invalid) break;
  }

  if (exhausted) {
    // Frontier ran dry on an invalid cluster: only possible when s is not
    // decodable cluster-locally; fall back to a global solve in the same
    // reliability order.
    const auto x = solve_mod2(H, s, order);
    if (!x) throw LsdError("syndrome is not in the column space of H");
    res.estimate = *x;
  } else {
    for (const auto& cptr : forest.clusters) {
      if (!cptr->alive) continue;
      for (std::uint32_t mech : cptr->elim.solve(forest.local_syndrome(*cptr)))
        res.estimate.set(mech, true);
    }
  }

  for (const auto& cptr : forest.clusters) {
    if (!cptr->alive) continue;
    ++res.stats.cluster_count;
    res.stats.largest_cluster = std::max(res.stats.largest_cluster, cptr->mechanisms.size());
  }

  if (!(matvec_mod2(H, res.estimate) == s))
    throw LsdError("internal error: correction does not reproduce the syndrome");
  return res;
}

}  // namespace vibelsd
