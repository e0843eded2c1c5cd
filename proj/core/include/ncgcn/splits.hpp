#pragma once

#include <cstdint>
#include <vector>

#include "ncgcn/labels.hpp"

namespace ncgcn {

/// Disjoint train/val/test node indices, each sorted ascending.
struct Splits {
    std::vector<std::int64_t> train;
    std::vector<std::int64_t> val;
    std::vector<std::int64_t> test;
};

/// Stratified 60/20/20 split: per class, a shuffled 60% (rounded down, at
/// least one node) goes to train; the pooled remainder is shuffled and cut in
/// half, odd leftover to test. Deterministic per seed.
/// Throws DataError when any class has fewer than 2 members.
Splits make_splits(const LabelVector& labels, std::uint64_t seed);

/// Order-sensitive FNV-1a digest of the three index lists, for report
/// provenance ("did these runs share a split?").
std::uint64_t split_hash(const Splits& s);

}  // namespace ncgcn
