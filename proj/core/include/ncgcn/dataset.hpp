#pragma once

#include <string>

#include "ncgcn/csr.hpp"
#include "ncgcn/dense.hpp"
#include "ncgcn/labels.hpp"

namespace ncgcn {

/// A loaded node-classification problem: symmetric simple graph, dense
/// features, labels covering [0, C).
struct Dataset {
    CsrMatrix a;
    DenseMatrix x;
    LabelVector labels;
    std::string name;

    std::int64_t n() const { return a.n_rows; }
    std::int64_t feature_dim() const { return x.cols; }
    std::int32_t num_classes() const { return labels.num_classes; }

    /// Throws DataError unless all cross-field invariants hold (dims agree,
    /// A symmetric with empty diagonal, every class non-empty).
    void validate() const;
};

}  // namespace ncgcn
