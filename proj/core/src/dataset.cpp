#include "ncgcn/dataset.hpp"

#include <string>
#include <vector>

#include "ncgcn/error.hpp"

namespace ncgcn {

void Dataset::validate() const {
    a.validate();
    if (a.n_rows != a.n_cols) throw DataError("dataset " + name + ": adjacency is not square");
    if (x.rows != a.n_rows) throw DataError("dataset " + name + ": feature rows != node count");
    if (static_cast<std::int64_t>(labels.label.size()) != a.n_rows) {
        throw DataError("dataset " + name + ": label count != node count");
    }
    if (labels.num_classes < 1) throw DataError("dataset " + name + ": class count must be positive");

    std::vector<std::int64_t> class_size(static_cast<std::size_t>(labels.num_classes), 0);
    for (std::size_t i = 0; i < labels.label.size(); ++i) {
        const std::int32_t y = labels.label[i];
        if (y < 0 || y >= labels.num_classes) {
            throw DataError("dataset " + name + ": label " + std::to_string(y) + " at node " + std::to_string(i) +
                            " out of range [0," + std::to_string(labels.num_classes) + ")");
        }
        class_size[static_cast<std::size_t>(y)]++;
    }
    for (std::size_t c = 0; c < class_size.size(); ++c) {
        if (class_size[c] == 0) throw DataError("dataset " + name + ": class " + std::to_string(c) + " is empty");
    }

    for (std::int64_t r = 0; r < a.n_rows; ++r) {
        for (NodeId c : a.row_cols(r)) {
            if (c == static_cast<NodeId>(r)) {
                throw DataError("dataset " + name + ": self-loop at node " + std::to_string(r));
            }
        }
    }
    if (!is_symmetric(a)) throw DataError("dataset " + name + ": adjacency is not symmetric");
    if (!x.all_finite()) throw DataError("dataset " + name + ": non-finite feature value");
}

}  // namespace ncgcn
