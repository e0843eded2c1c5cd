#include "ncgcn/sbm.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ncgcn/error.hpp"
#include "ncgcn/rng.hpp"

namespace ncgcn {

void SbmSpec::validate() const {
    if (n < 2) throw ConfigError("sbm: n must be at least 2");
    if (num_classes < 2) throw ConfigError("sbm: need at least 2 classes");
    if (n < num_classes) throw ConfigError("sbm: n must be at least the class count");
    if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) {
        throw ConfigError("sbm: probabilities must satisfy 0 <= p_out <= p_in <= 1");
    }
    if (feature_dim < num_classes) throw ConfigError("sbm: feature_dim must be at least the class count");
    if (!(feature_noise >= 0.0) || !std::isfinite(feature_noise)) {
        throw ConfigError("sbm: feature_noise must be a finite non-negative real");
    }
}

Dataset gen_sbm(const SbmSpec& spec) {
    spec.validate();
    const std::int64_t n = spec.n;

    Dataset d;
    d.name = spec.name;
    d.labels.num_classes = spec.num_classes;
    d.labels.label.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        // contiguous blocks whose sizes differ by at most one
        d.labels.label[static_cast<std::size_t>(i)] =
            static_cast<std::int32_t>((i * spec.num_classes) / n);
    }

    Rng edge_rng(spec.seed, RngStream::SbmEdges);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
            const bool same = d.labels.label[static_cast<std::size_t>(i)] ==
                              d.labels.label[static_cast<std::size_t>(j)];
            if (edge_rng.bernoulli(same ? spec.p_in : spec.p_out)) {
                edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    }
    d.a = build_csr(edges, n, true);

    Rng feat_rng(spec.seed, RngStream::SbmFeatures);
    d.x = DenseMatrix(n, spec.feature_dim);
    for (std::int64_t i = 0; i < n; ++i) {
        double* row = d.x.row_ptr(i);
        row[d.labels.label[static_cast<std::size_t>(i)]] = 1.0;
        if (spec.feature_noise > 0.0) {
            for (std::int64_t f = 0; f < spec.feature_dim; ++f) row[f] += spec.feature_noise * feat_rng.normal();
        }
    }
    return d;
}

Dataset gen_mixed_confusion(std::int64_t n, std::uint64_t seed) {
    if (n < 8 || n % 4 != 0) throw ConfigError("mixed_confusion: n must be a multiple of 4, at least 8");
    const std::int64_t half = n / 2;
    const std::int64_t quarter = n / 4;
    constexpr double kAssortativeIn = 0.05;
    constexpr double kAssortativeOut = 0.002;
    constexpr double kBlindP = 0.02;
    constexpr double kCleanNoise = 0.3;
    constexpr double kLoudNoise = 2.0;
    constexpr std::int64_t kFeatureDim = 8;

    Dataset d;
    d.name = "mixed_confusion";
    d.labels.num_classes = 2;
    d.labels.label.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t within = i % half;
        d.labels.label[static_cast<std::size_t>(i)] = within < quarter ? 0 : 1;
    }

    Rng edge_rng(seed, RngStream::SbmEdges);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::int64_t i = 0; i < n; ++i) {
        const bool i_assortative = i < half;
        for (std::int64_t j = i + 1; j < n; ++j) {
            if ((j < half) != i_assortative) continue;  // regions stay disconnected
            double p;
            if (i_assortative) {
                const bool same = d.labels.label[static_cast<std::size_t>(i)] ==
                                  d.labels.label[static_cast<std::size_t>(j)];
                p = same ? kAssortativeIn : kAssortativeOut;
            } else {
                p = kBlindP;
            }
            if (edge_rng.bernoulli(p)) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
    }
    d.a = build_csr(edges, n, true);

    Rng feat_rng(seed, RngStream::SbmFeatures);
    d.x = DenseMatrix(n, kFeatureDim);
    for (std::int64_t i = 0; i < n; ++i) {
        double* row = d.x.row_ptr(i);
        const auto label = d.labels.label[static_cast<std::size_t>(i)];
        // Region one features are loud class-free noise sitting on the same
        // coordinates region two uses for its clean one-hot, so any shared
        // linear read of the raw features imports region-one noise at full
        // strength; region one is classifiable only through its structure.
        if (i >= half) row[label] = 1.0;
        const double sigma = i < half ? kLoudNoise : kCleanNoise;
        for (std::int64_t f = 0; f < kFeatureDim; ++f) row[f] += sigma * feat_rng.normal();
    }
    return d;
}

}  // namespace ncgcn
