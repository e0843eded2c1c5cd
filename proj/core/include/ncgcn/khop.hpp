#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncgcn/csr.hpp"

namespace ncgcn {

/// Per-node index of every neighbor reachable in 1..k hops, excluding the
/// node itself. Built once per graph and reused for every metric update.
struct KHopIndex {
    int k = 1;
    std::vector<std::int64_t> offsets;  // length n+1
    std::vector<NodeId> ids;            // sorted within each node's slice

    std::int64_t n_nodes() const { return static_cast<std::int64_t>(offsets.size()) - 1; }

    std::span<const NodeId> neighbors(std::int64_t i) const {
        return {ids.data() + offsets[i], static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
    }
};

/// neighbors[i] = { j : 1 <= shortest_path(i,j) <= k }. A must be symmetric.
/// k=2 runs in O(sum_i deg_i^2) using a stamp array instead of per-node sets.
KHopIndex khop_index(const CsrMatrix& a, int k);

}  // namespace ncgcn
