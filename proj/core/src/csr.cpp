#include "ncgcn/csr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncgcn/error.hpp"

namespace ncgcn {

bool masks_partition(const NodeMask& low, const NodeMask& high) {
    if (low.size() != high.size()) return false;
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (low.member[i] + high.member[i] != 1) return false;
    }
    return true;
}

void CsrMatrix::validate() const {
    if (static_cast<std::int64_t>(row_ptr.size()) != n_rows + 1) throw InternalError("csr: row_ptr length mismatch");
    if (row_ptr.front() != 0) throw InternalError("csr: row_ptr[0] != 0");
    if (row_ptr.back() != nnz()) throw InternalError("csr: row_ptr[n] != nnz");
    if (values.size() != col_idx.size()) throw InternalError("csr: values/col_idx length mismatch");
    for (std::int64_t r = 0; r < n_rows; ++r) {
        if (row_ptr[r] > row_ptr[r + 1]) throw InternalError("csr: decreasing row_ptr");
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            if (col_idx[k] < 0 || col_idx[k] >= n_cols) throw InternalError("csr: column out of range");
            if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) throw InternalError("csr: unsorted or duplicate column");
            if (!std::isfinite(values[k])) throw InternalError("csr: non-finite value");
        }
    }
}

CsrMatrix CsrMatrix::identity(std::int64_t n) {
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_ptr.resize(n + 1);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (std::int64_t i = 0; i < n; ++i) {
        m.row_ptr[i] = i;
        m.col_idx[i] = static_cast<NodeId>(i);
    }
    m.row_ptr[n] = n;
    return m;
}

CsrMatrix build_csr(const std::vector<std::pair<NodeId, NodeId>>& edges, std::int64_t n, bool symmetrize) {
    if (n < 0) throw InputError("build_csr: negative node count");
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(edges.size() * (symmetrize ? 2 : 1));
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n) {
            throw InputError("build_csr: node id out of range [0," + std::to_string(n) + "): (" + std::to_string(u) +
                             "," + std::to_string(v) + ")");
        }
        if (u == v) continue;  // self-loops are re-added by normalization only
        pairs.emplace_back(u, v);
        if (symmetrize) pairs.emplace_back(v, u);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    CsrMatrix a;
    a.n_rows = a.n_cols = n;
    a.row_ptr.assign(n + 1, 0);
    a.col_idx.reserve(pairs.size());
    a.values.assign(pairs.size(), 1.0);
    for (const auto& [u, v] : pairs) a.row_ptr[u + 1]++;
    for (std::int64_t i = 0; i < n; ++i) a.row_ptr[i + 1] += a.row_ptr[i];
    for (const auto& [u, v] : pairs) a.col_idx.push_back(v);
    return a;
}

DegreeVector degrees(const CsrMatrix& a) {
    DegreeVector d;
    d.degree.assign(a.n_rows, 0.0);
    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        double s = 0.0;
        for (double v : a.row_vals(r)) s += v;
        d.degree[r] = s;
    }
    return d;
}

CsrMatrix symmetric_normalize(const CsrMatrix& a, bool add_self_loop) {
    if (a.n_rows != a.n_cols) throw InputError("symmetric_normalize: matrix must be square");
    const std::int64_t n = a.n_rows;

    CsrMatrix s;
    s.n_rows = s.n_cols = n;
    s.row_ptr.assign(n + 1, 0);

    // Assemble A (+I) rows first, then scale by the inverse square roots.
    std::vector<double> inv_sqrt(n, 0.0);
    {
        std::vector<double> deg(n, 0.0);
        for (std::int64_t r = 0; r < n; ++r) {
            for (double v : a.row_vals(r)) deg[r] += v;
            if (add_self_loop) deg[r] += 1.0;
        }
        for (std::int64_t i = 0; i < n; ++i) inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    }

    s.col_idx.reserve(a.nnz() + (add_self_loop ? n : 0));
    s.values.reserve(a.nnz() + (add_self_loop ? n : 0));
    for (std::int64_t r = 0; r < n; ++r) {
        auto cols = a.row_cols(r);
        auto vals = a.row_vals(r);
        bool self_inserted = !add_self_loop;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (!self_inserted && cols[k] > static_cast<NodeId>(r)) {
                s.col_idx.push_back(static_cast<NodeId>(r));
                s.values.push_back(inv_sqrt[r] * inv_sqrt[r]);
                self_inserted = true;
            }
            s.col_idx.push_back(cols[k]);
            s.values.push_back(vals[k] * inv_sqrt[r] * inv_sqrt[cols[k]]);
        }
        if (!self_inserted) {
            s.col_idx.push_back(static_cast<NodeId>(r));
            s.values.push_back(inv_sqrt[r] * inv_sqrt[r]);
        }
        s.row_ptr[r + 1] = static_cast<std::int64_t>(s.col_idx.size());
    }
    return s;
}

CsrMatrix apply_mask(const CsrMatrix& p, const NodeMask& mask, MaskSide side) {
    const std::int64_t masked_dim = side == MaskSide::Rows ? p.n_rows : p.n_cols;
    if (static_cast<std::int64_t>(mask.size()) != masked_dim) {
        throw InputError("apply_mask: mask length " + std::to_string(mask.size()) + " != dimension " +
                         std::to_string(masked_dim));
    }
    CsrMatrix out;
    out.n_rows = p.n_rows;
    out.n_cols = p.n_cols;
    out.row_ptr.assign(p.n_rows + 1, 0);
    out.col_idx.reserve(p.col_idx.size());
    out.values.reserve(p.values.size());
    for (std::int64_t r = 0; r < p.n_rows; ++r) {
        if (side != MaskSide::Rows || mask[static_cast<std::size_t>(r)]) {
            auto cols = p.row_cols(r);
            auto vals = p.row_vals(r);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (side == MaskSide::Cols && !mask[static_cast<std::size_t>(cols[k])]) continue;
                out.col_idx.push_back(cols[k]);
                out.values.push_back(vals[k]);
            }
        }
        out.row_ptr[r + 1] = static_cast<std::int64_t>(out.col_idx.size());
    }
    return out;
}

DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& x) {
    if (s.n_cols != x.rows) {
        throw InputError("spmm: shape mismatch (" + std::to_string(s.n_rows) + "x" + std::to_string(s.n_cols) +
                         ") * (" + std::to_string(x.rows) + "x" + std::to_string(x.cols) + ")");
    }
    DenseMatrix out(s.n_rows, x.cols);
    const std::int64_t d = x.cols;
    for (std::int64_t r = 0; r < s.n_rows; ++r) {
        double* dst = out.row_ptr(r);
        auto cols = s.row_cols(r);
        auto vals = s.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double w = vals[k];
            const double* src = x.row_ptr(cols[k]);
            for (std::int64_t j = 0; j < d; ++j) dst[j] += w * src[j];
        }
    }
    return out;
}

DenseMatrix to_dense(const CsrMatrix& s) {
    DenseMatrix out(s.n_rows, s.n_cols);
    for (std::int64_t r = 0; r < s.n_rows; ++r) {
        auto cols = s.row_cols(r);
        auto vals = s.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) out.at(r, cols[k]) = vals[k];
    }
    return out;
}

CsrMatrix transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_ptr.assign(t.n_rows + 1, 0);
    t.col_idx.resize(a.col_idx.size());
    t.values.resize(a.values.size());
    for (NodeId c : a.col_idx) t.row_ptr[c + 1]++;
    for (std::int64_t i = 0; i < t.n_rows; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
    std::vector<std::int64_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        auto cols = a.row_cols(r);
        auto vals = a.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::int64_t slot = cursor[cols[k]]++;
            t.col_idx[slot] = static_cast<NodeId>(r);
            t.values[slot] = vals[k];
        }
    }
    return t;
}

bool is_symmetric(const CsrMatrix& a) {
    if (a.n_rows != a.n_cols) return false;
    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        auto cols = a.row_cols(r);
        auto vals = a.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const NodeId c = cols[k];
            auto back_cols = a.row_cols(c);
            auto it = std::lower_bound(back_cols.begin(), back_cols.end(), static_cast<NodeId>(r));
            if (it == back_cols.end() || *it != static_cast<NodeId>(r)) return false;
            const double back = a.row_vals(c)[static_cast<std::size_t>(it - back_cols.begin())];
            if (back != vals[k]) return false;
        }
    }
    return true;
}

}  // namespace ncgcn
