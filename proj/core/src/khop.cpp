#include "ncgcn/khop.hpp"

#include <algorithm>
#include <string>

#include "ncgcn/error.hpp"

namespace ncgcn {

KHopIndex khop_index(const CsrMatrix& a, int k) {
    if (k != 1 && k != 2) throw ConfigError("khop_index: k must be 1 or 2, got " + std::to_string(k));
    const std::int64_t n = a.n_rows;

    KHopIndex idx;
    idx.k = k;
    idx.offsets.assign(n + 1, 0);

    if (k == 1) {
        idx.ids.assign(a.col_idx.begin(), a.col_idx.end());
        idx.offsets.assign(a.row_ptr.begin(), a.row_ptr.end());
        return idx;
    }

    // k == 2: stamp-marked union of 1-hop and 2-hop, then sort each slice.
    std::vector<std::int64_t> stamp(n, -1);
    std::vector<NodeId> scratch;
    for (std::int64_t i = 0; i < n; ++i) {
        scratch.clear();
        stamp[i] = i;  // never include the node itself
        for (NodeId j : a.row_cols(i)) {
            if (stamp[j] != i) {
                stamp[j] = i;
                scratch.push_back(j);
            }
            for (NodeId l : a.row_cols(j)) {
                if (stamp[l] != i) {
                    stamp[l] = i;
                    scratch.push_back(l);
                }
            }
        }
        std::sort(scratch.begin(), scratch.end());
        idx.ids.insert(idx.ids.end(), scratch.begin(), scratch.end());
        idx.offsets[i + 1] = static_cast<std::int64_t>(idx.ids.size());
    }
    return idx;
}

}  // namespace ncgcn
