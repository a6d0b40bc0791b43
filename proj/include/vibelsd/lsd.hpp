#pragma once

#include <span>
#include <stdexcept>

#include "vibelsd/gf2.hpp"

namespace vibelsd {

struct LsdStats {
  std::size_t largest_cluster = 0;  // kappa: largest mechanism set
  std::size_t cluster_count = 0;
};

struct LsdResult {
  BitVector estimate;
  LsdStats stats;
};

// Raised when the syndrome is not in the column space of H (malformed
// input; syndromes sampled from a detector error model are always
// decodable).
class LsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// LSD-0: seed one cluster per activated detector, grow invalid clusters
// round-robin by one mechanism at a time in order of reliability (lower
// soft score = more likely flipped; ties by lower mechanism index), merge
// clusters that touch, validate by incremental GF(2) elimination, and solve
// each valid cluster locally with support restricted to its pivot columns.
// The returned estimate always satisfies H e = s.
LsdResult lsd0_decode(const SparseBinaryMatrix& H, const BitVector& s,
                      std::span<const double> soft);

}  // namespace vibelsd
