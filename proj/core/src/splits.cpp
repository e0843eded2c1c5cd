#include "ncgcn/splits.hpp"

#include <algorithm>
#include <string>

#include "ncgcn/error.hpp"
#include "ncgcn/rng.hpp"

namespace ncgcn {

Splits make_splits(const LabelVector& labels, std::uint64_t seed) {
    labels.validate();
    const std::int64_t n = labels.size();
    const std::int32_t c_count = labels.num_classes;

    std::vector<std::vector<std::int64_t>> by_class(static_cast<std::size_t>(c_count));
    for (std::int64_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels.label[i])].push_back(i);

    Rng rng(seed, RngStream::Split);
    Splits s;
    std::vector<std::int64_t> pool;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.size() < 2) {
            throw DataError("make_splits: class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                            " member(s), need at least 2");
        }
        rng.shuffle(members);
        const std::size_t take = std::max<std::size_t>(1, (members.size() * 6) / 10);
        s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
        pool.insert(pool.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    rng.shuffle(pool);
    const std::size_t val_take = pool.size() / 2;
    s.val.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(val_take));
    s.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(val_take), pool.end());

    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

std::uint64_t split_hash(const Splits& s) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (const auto* part : {&s.train, &s.val, &s.test}) {
        for (std::int64_t i : *part) mix(static_cast<std::uint64_t>(i));
        mix(0xfffffffffffffffeull);
    }
    return h;
}

}  // namespace ncgcn
