#pragma once

#include <cstdint>
#include <string>

#include "ncgcn/dataset.hpp"

namespace ncgcn {

/// Planted-partition generator spec. Classes are contiguous blocks of near
/// equal size; intra-class pairs link with p_in, inter-class with p_out.
struct SbmSpec {
    std::int64_t n = 0;
    std::int32_t num_classes = 2;
    double p_in = 0.0;
    double p_out = 0.0;
    std::int64_t feature_dim = 0;
    double feature_noise = 0.0;  // sigma of the additive Gaussian
    std::uint64_t seed = 0;
    std::string name = "sbm";

    void validate() const;  // throws ConfigError
};

/// Features are the one-hot class mean plus Gaussian noise, so feature_dim
/// must be at least the class count. Deterministic per seed.
Dataset gen_sbm(const SbmSpec& spec);

/// Two disconnected regions of n/2 nodes each under one binary labeling:
/// region one is strongly assortative (p_out/p_in near 0) but its features
/// are loud class-free noise, region two has class-blind edges (p_in =
/// p_out) but clean class-informative features on the same coordinates.
/// A shared raw-feature pathway imports region-one noise at whatever weight
/// serves region two, so splitting nodes by confusion is the cheap way to
/// exploit both signals at once. n must be divisible by 4.
Dataset gen_mixed_confusion(std::int64_t n, std::uint64_t seed);

}  // namespace ncgcn
