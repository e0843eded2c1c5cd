#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ncgcn/csr.hpp"
#include "ncgcn/khop.hpp"
#include "ncgcn/labels.hpp"

namespace ncgcn {

enum class MetricKind { NC, NH, Entropy };

/// Per-node metric values in [0,1]. NaN is forbidden by construction: every
/// producer defines the degenerate cases explicitly.
struct MetricVector {
    std::vector<double> value;
    MetricKind kind = MetricKind::NC;

    std::int64_t size() const { return static_cast<std::int64_t>(value.size()); }
};

/// Confusion state driving the channel separation: metric values, threshold,
/// and the two complementary masks. A fresh state has every value at 0, which
/// puts all nodes in the low channel.
struct NcState {
    int k = 1;
    double threshold = 0.5;
    MetricVector nc;
    NodeMask mask_low;
    NodeMask mask_high;
};

/// Equal-width binned diagnostics over [0,1]: node count, accuracy and
/// high-confusion proportion per bin. Empty bins carry count 0 and NaN for
/// the two averages ("absent").
struct GroupReport {
    std::vector<double> bin_edges;  // length bins+1
    std::vector<std::int64_t> count;
    std::vector<double> accuracy;
    std::vector<double> high_proportion;
};

/// Fraction of direct neighbors sharing the node's own label. Isolated nodes
/// get 0 (unconfused by convention; avoids NaN).
MetricVector node_homophily(const KHopIndex& index1, const LabelVector& labels);

/// Label-confusion of the k-hop ego-set (node included): negative log of the
/// majority-class fraction, normalized by log C. 0 means unanimous, values
/// near 1 mean maximally mixed.
MetricVector neighborhood_confusion(const KHopIndex& index, const LabelVector& labels);

/// Normalized Shannon entropy of the same ego-set label distribution, with
/// 0*log 0 := 0. Upper-bounds neighborhood_confusion everywhere.
MetricVector entropy_oracle(const KHopIndex& index, const LabelVector& labels);

/// low = (value <= T), high = (value > T). T must lie in (0,1). The boundary
/// value goes to low.
std::pair<NodeMask, NodeMask> build_masks(const MetricVector& nc, double threshold);

/// Homophily-based split: low-confusion channel = homophilous nodes
/// (NH >= T), high-confusion = heterophilous (NH < T). Ties go homophilous.
std::pair<NodeMask, NodeMask> nh_masks(const MetricVector& nh, double threshold = 0.5);

/// Bin `values` into equal-width bins over [0,1] and average correctness and
/// high-flag membership per bin. Value 1.0 lands in the last bin.
GroupReport group_report(const MetricVector& values, const std::vector<std::uint8_t>& correct,
                         const NodeMask& high_flag, int bins = 10);

/// |pseudo & truth| / |truth|; 1.0 when truth is empty (vacuous recall).
double mask_recall(const NodeMask& pseudo_high, const NodeMask& truth_high);

/// Fraction of nodes with value > T.
double high_nc_proportion(const MetricVector& nc, double threshold);

enum class DuplicationMode { StructureLabel, FeatureLabel };

/// Fraction of nodes whose key (sorted neighbor list + label, or exact
/// feature row + label) collides with another node's. A collision group of
/// size g contributes g-1 duplicates.
double duplication_rate(const CsrMatrix& a, const LabelVector& labels, const DenseMatrix& x, DuplicationMode mode);

}  // namespace ncgcn
