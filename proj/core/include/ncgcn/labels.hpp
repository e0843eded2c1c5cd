#pragma once

#include <cstdint>
#include <vector>

namespace ncgcn {

/// Node class assignments. `num_classes` is the declared class count C; every
/// entry must lie in [0, C). Also holds pseudo labels during training.
struct LabelVector {
    std::vector<std::int32_t> label;
    std::int32_t num_classes = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(label.size()); }

    /// Throws InputError when an entry is out of range or C < 2 is combined
    /// with a non-empty vector.
    void validate() const;
};

}  // namespace ncgcn
