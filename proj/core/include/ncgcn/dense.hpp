#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ncgcn {

/// Row-major dense matrix of doubles. The workhorse container for features,
/// hidden states and weights.
struct DenseMatrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> data;  // rows*cols, row-major

    DenseMatrix() = default;
    DenseMatrix(std::int64_t r, std::int64_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

    double& at(std::int64_t r, std::int64_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return data[static_cast<std::size_t>(r * cols + c)]; }

    double* row_ptr(std::int64_t r) { return data.data() + r * cols; }
    const double* row_ptr(std::int64_t r) const { return data.data() + r * cols; }

    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    static DenseMatrix identity(std::int64_t n) {
        DenseMatrix m(n, n);
        for (std::int64_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    bool all_finite() const;
};

/// C = A * B. Backed by CBLAS dgemm when available.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B without materializing the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T without materializing the transpose.
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

/// acc += m, elementwise. Shapes must match.
void add_inplace(DenseMatrix& acc, const DenseMatrix& m);

/// out = a + b.
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);

/// m *= s, elementwise.
void scale_inplace(DenseMatrix& m, double s);

/// Zero out the rows whose mask bit is unset. `mask` has one byte per row.
void zero_masked_rows(DenseMatrix& m, const std::vector<std::uint8_t>& keep);

}  // namespace ncgcn
