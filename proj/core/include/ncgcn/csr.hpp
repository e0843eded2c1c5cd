#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ncgcn/dense.hpp"

namespace ncgcn {

using NodeId = std::int32_t;

/// Diagonal 0/1 matrix over nodes, stored as one byte per node.
struct NodeMask {
    std::vector<std::uint8_t> member;

    NodeMask() = default;
    explicit NodeMask(std::size_t n, bool value = false) : member(n, value ? 1 : 0) {}

    std::size_t size() const { return member.size(); }
    bool operator[](std::size_t i) const { return member[i] != 0; }
    void set(std::size_t i, bool v) { member[i] = v ? 1 : 0; }

    std::int64_t count() const {
        std::int64_t c = 0;
        for (auto b : member) c += b;
        return c;
    }
};

/// True when `low` and `high` are complementary over the same node set.
bool masks_partition(const NodeMask& low, const NodeMask& high);

/// Per-node degree (row sums of the matrix it was derived from).
struct DegreeVector {
    std::vector<double> degree;
};

enum class MaskSide { Rows, Cols };

/// Compressed sparse row matrix with strictly sorted, duplicate-free columns
/// in every row. Immutable after construction; shared read-only across
/// concurrent channel evaluations.
struct CsrMatrix {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    std::vector<std::int64_t> row_ptr;  // length n_rows+1, non-decreasing
    std::vector<NodeId> col_idx;
    std::vector<double> values;

    std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }

    std::span<const NodeId> row_cols(std::int64_t r) const {
        return {col_idx.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }
    std::span<const double> row_vals(std::int64_t r) const {
        return {values.data() + row_ptr[r], static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
    }

    /// Structural + value invariant check; throws InternalError on violation.
    void validate() const;

    static CsrMatrix identity(std::int64_t n);
};

/// Build a binary adjacency matrix from an edge list. Ids must lie in [0, n).
/// Self-loops in the input are dropped; duplicates are merged. With
/// `symmetrize` every edge is stored in both directions.
CsrMatrix build_csr(const std::vector<std::pair<NodeId, NodeId>>& edges, std::int64_t n, bool symmetrize);

/// Row sums.
DegreeVector degrees(const CsrMatrix& a);

/// S = D^{-1/2} (A + I) D^{-1/2} with D the degree of A+I when
/// `add_self_loop`, else D^{-1/2} A D^{-1/2}. Zero-degree nodes get scale
/// factor 0, so their rows and columns stay all-zero instead of blowing up.
CsrMatrix symmetric_normalize(const CsrMatrix& a, bool add_self_loop);

/// Drop the stored entries of masked-out rows (or columns). The result keeps
/// only entries whose row (column) has mask bit 1.
CsrMatrix apply_mask(const CsrMatrix& p, const NodeMask& mask, MaskSide side);

/// Exact sparse-dense product S * X with ascending-column accumulation per
/// output row, so results are bit-reproducible. Rows are independent.
DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x);

/// Densify (test/oracle helper for small matrices).
DenseMatrix to_dense(const CsrMatrix& s);

bool is_symmetric(const CsrMatrix& a);

CsrMatrix transpose(const CsrMatrix& a);

}  // namespace ncgcn
