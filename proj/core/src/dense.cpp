#include "ncgcn/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncgcn/error.hpp"

#ifdef NCGCN_HAVE_CBLAS
#include <cblas.h>
#endif

namespace ncgcn {

bool DenseMatrix::all_finite() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void check_inner(std::int64_t a, std::int64_t b, const char* op) {
    if (a != b) {
        throw InputError(std::string(op) + ": inner dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
    }
}

#ifndef NCGCN_HAVE_CBLAS
// Portable ikj fallback, only compiled when no CBLAS is found.
void gemm_fallback(bool trans_a, bool trans_b, const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
    const std::int64_t m = c.rows;
    const std::int64_t n = c.cols;
    const std::int64_t k = trans_a ? a.rows : a.cols;
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t l = 0; l < k; ++l) {
            const double av = trans_a ? a.at(l, i) : a.at(i, l);
            if (av == 0.0) continue;
            for (std::int64_t j = 0; j < n; ++j) {
                c.at(i, j) += av * (trans_b ? b.at(j, l) : b.at(l, j));
            }
        }
    }
}
#endif

DenseMatrix gemm(bool trans_a, bool trans_b, const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    const std::int64_t m = trans_a ? a.cols : a.rows;
    const std::int64_t ka = trans_a ? a.rows : a.cols;
    const std::int64_t kb = trans_b ? b.cols : b.rows;
    const std::int64_t n = trans_b ? b.rows : b.cols;
    check_inner(ka, kb, op);
    DenseMatrix c(m, n);
    if (m == 0 || n == 0 || ka == 0) return c;
#ifdef NCGCN_HAVE_CBLAS
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans,
                static_cast<int>(m), static_cast<int>(n), static_cast<int>(ka), 1.0, a.data.data(),
                static_cast<int>(a.cols), b.data.data(), static_cast<int>(b.cols), 0.0, c.data.data(),
                static_cast<int>(c.cols));
#else
    gemm_fallback(trans_a, trans_b, a, b, c);
#endif
    return c;
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) { return gemm(false, false, a, b, "matmul"); }

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) { return gemm(true, false, a, b, "matmul_at_b"); }

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) { return gemm(false, true, a, b, "matmul_a_bt"); }

void add_inplace(DenseMatrix& acc, const DenseMatrix& m) {
    if (!acc.same_shape(m)) throw InputError("add_inplace: shape mismatch");
    for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += m.data[i];
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out = a;
    add_inplace(out, b);
    return out;
}

void scale_inplace(DenseMatrix& m, double s) {
    for (double& v : m.data) v *= s;
}

void zero_masked_rows(DenseMatrix& m, const std::vector<std::uint8_t>& keep) {
    if (static_cast<std::int64_t>(keep.size()) != m.rows) throw InputError("zero_masked_rows: mask length mismatch");
    for (std::int64_t r = 0; r < m.rows; ++r) {
        if (!keep[static_cast<std::size_t>(r)]) std::fill(m.row_ptr(r), m.row_ptr(r) + m.cols, 0.0);
    }
}

}  // namespace ncgcn
