#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ncgcn/dense.hpp"
#include "ncgcn/rng.hpp"

namespace ncgcn {

/// A trainable weight with its gradient and Adam moment buffers. Scalars are
/// 1x1 matrices. Single-writer: when two channels contribute to a shared
/// tensor, the accumulation order is fixed (low channel first, then high).
struct ParamTensor {
    std::string name;
    DenseMatrix value;
    DenseMatrix grad;
    DenseMatrix adam_m;
    DenseMatrix adam_v;
    std::int64_t step_count = 0;

    ParamTensor() = default;
    ParamTensor(std::string param_name, std::int64_t rows, std::int64_t cols)
        : name(std::move(param_name)), value(rows, cols), grad(rows, cols), adam_m(rows, cols), adam_v(rows, cols) {}

    std::int64_t numel() const { return value.rows * value.cols; }

    void zero_grad() { grad.fill(0.0); }

    /// Glorot-style uniform init in +-sqrt(6/(fan_in+fan_out)).
    void glorot_init(Rng& rng) {
        const double bound = std::sqrt(6.0 / static_cast<double>(value.rows + value.cols));
        for (double& v : value.data) v = rng.uniform(-bound, bound);
    }
};

}  // namespace ncgcn
