#include "ncgcn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>

#include "ncgcn/error.hpp"

namespace ncgcn {

void LabelVector::validate() const {
    if (!label.empty() && num_classes < 2) {
        throw InputError("labels: class count must be >= 2, got " + std::to_string(num_classes));
    }
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] < 0 || label[i] >= num_classes) {
            throw InputError("labels: label " + std::to_string(label[i]) + " at node " + std::to_string(i) +
                             " outside [0," + std::to_string(num_classes) + ")");
        }
    }
}

MetricVector node_homophily(const KHopIndex& index1, const LabelVector& labels) {
    if (index1.k != 1) throw InputError("node_homophily: needs a 1-hop index");
    if (index1.n_nodes() != labels.size()) throw InputError("node_homophily: index/label length mismatch");
    MetricVector out;
    out.kind = MetricKind::NH;
    out.value.resize(labels.label.size(), 0.0);
    for (std::int64_t i = 0; i < index1.n_nodes(); ++i) {
        auto nbrs = index1.neighbors(i);
        if (nbrs.empty()) continue;  // isolated: defined as 0
        std::int64_t same = 0;
        for (NodeId j : nbrs) same += labels.label[j] == labels.label[i];
        out.value[i] = static_cast<double>(same) / static_cast<double>(nbrs.size());
    }
    return out;
}

namespace {

// Shared class-counting walk over ego-sets. Calls fn(counts span, set_size)
// once per node with the label counts of neighbors(i) + {i}.
template <typename Fn>
void for_each_ego_count(const KHopIndex& index, const LabelVector& labels, Fn&& fn) {
    labels.validate();
    if (labels.num_classes < 2) throw ConfigError("metrics: class count must be >= 2 (log C = 0 otherwise)");
    if (index.n_nodes() != labels.size()) throw InputError("metrics: index/label length mismatch");
    const std::int32_t c = labels.num_classes;
    std::vector<std::int64_t> counts(c, 0);
    std::vector<std::int32_t> touched;
    touched.reserve(16);
    for (std::int64_t i = 0; i < index.n_nodes(); ++i) {
        auto bump = [&](std::int32_t cls) {
            if (counts[cls] == 0) touched.push_back(cls);
            counts[cls]++;
        };
        bump(labels.label[i]);
        for (NodeId j : index.neighbors(i)) bump(labels.label[j]);
        const std::int64_t set_size = static_cast<std::int64_t>(index.neighbors(i).size()) + 1;
        fn(i, counts, set_size);
        for (std::int32_t cls : touched) counts[cls] = 0;
        touched.clear();
    }
}

}  // namespace

MetricVector neighborhood_confusion(const KHopIndex& index, const LabelVector& labels) {
    MetricVector out;
    out.kind = MetricKind::NC;
    out.value.resize(labels.label.size(), 0.0);
    const double log_c = std::log(static_cast<double>(labels.num_classes));
    for_each_ego_count(index, labels, [&](std::int64_t i, const std::vector<std::int64_t>& counts, std::int64_t m) {
        const std::int64_t max_count = *std::max_element(counts.begin(), counts.end());
        out.value[i] = -std::log(static_cast<double>(max_count) / static_cast<double>(m)) / log_c;
    });
    return out;
}

MetricVector entropy_oracle(const KHopIndex& index, const LabelVector& labels) {
    MetricVector out;
    out.kind = MetricKind::Entropy;
    out.value.resize(labels.label.size(), 0.0);
    const double log_c = std::log(static_cast<double>(labels.num_classes));
    for_each_ego_count(index, labels, [&](std::int64_t i, const std::vector<std::int64_t>& counts, std::int64_t m) {
        double h = 0.0;
        for (std::int64_t cnt : counts) {
            if (cnt == 0) continue;
            const double p = static_cast<double>(cnt) / static_cast<double>(m);
            h -= p * std::log(p);
        }
        out.value[i] = h / log_c;
    });
    return out;
}

std::pair<NodeMask, NodeMask> build_masks(const MetricVector& nc, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("build_masks: threshold must lie in (0,1), got " + std::to_string(threshold));
    }
    NodeMask low(nc.value.size());
    NodeMask high(nc.value.size());
    for (std::size_t i = 0; i < nc.value.size(); ++i) {
        const bool is_low = nc.value[i] <= threshold;
        low.member[i] = is_low;
        high.member[i] = !is_low;
    }
    return {low, high};
}

std::pair<NodeMask, NodeMask> nh_masks(const MetricVector& nh, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("nh_masks: threshold must lie in (0,1), got " + std::to_string(threshold));
    }
    NodeMask low(nh.value.size());
    NodeMask high(nh.value.size());
    for (std::size_t i = 0; i < nh.value.size(); ++i) {
        const bool homophilous = nh.value[i] >= threshold;
        low.member[i] = homophilous;
        high.member[i] = !homophilous;
    }
    return {low, high};
}

GroupReport group_report(const MetricVector& values, const std::vector<std::uint8_t>& correct,
                         const NodeMask& high_flag, int bins) {
    if (bins < 1) throw ConfigError("group_report: bins must be >= 1");
    if (correct.size() != values.value.size() || high_flag.size() != values.value.size()) {
        throw InputError("group_report: length mismatch");
    }
    GroupReport r;
    r.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) r.bin_edges[b] = static_cast<double>(b) / bins;
    r.count.assign(bins, 0);
    std::vector<double> correct_sum(bins, 0.0);
    std::vector<double> high_sum(bins, 0.0);
    for (std::size_t i = 0; i < values.value.size(); ++i) {
        int b = static_cast<int>(values.value[i] * bins);
        b = std::clamp(b, 0, bins - 1);  // value 1.0 lands in the last bin
        r.count[b]++;
        correct_sum[b] += correct[i];
        high_sum[b] += high_flag.member[i];
    }
    r.accuracy.assign(bins, std::nan(""));
    r.high_proportion.assign(bins, std::nan(""));
    for (int b = 0; b < bins; ++b) {
        if (r.count[b] > 0) {
            r.accuracy[b] = correct_sum[b] / static_cast<double>(r.count[b]);
            r.high_proportion[b] = high_sum[b] / static_cast<double>(r.count[b]);
        }
    }
    return r;
}

double mask_recall(const NodeMask& pseudo_high, const NodeMask& truth_high) {
    if (pseudo_high.size() != truth_high.size()) throw InputError("mask_recall: length mismatch");
    std::int64_t truth = 0;
    std::int64_t hit = 0;
    for (std::size_t i = 0; i < truth_high.size(); ++i) {
        if (truth_high.member[i]) {
            truth++;
            hit += pseudo_high.member[i];
        }
    }
    if (truth == 0) return 1.0;  // vacuous
    return static_cast<double>(hit) / static_cast<double>(truth);
}

double high_nc_proportion(const MetricVector& nc, double threshold) {
    if (nc.value.empty()) return 0.0;
    std::int64_t high = 0;
    for (double v : nc.value) high += v > threshold;
    return static_cast<double>(high) / static_cast<double>(nc.value.size());
}

double duplication_rate(const CsrMatrix& a, const LabelVector& labels, const DenseMatrix& x, DuplicationMode mode) {
    const std::int64_t n = labels.size();
    if (n == 0) return 0.0;
    std::unordered_map<std::string, std::int64_t> groups;
    groups.reserve(static_cast<std::size_t>(n));
    std::string key;
    for (std::int64_t i = 0; i < n; ++i) {
        key.clear();
        key.append(reinterpret_cast<const char*>(&labels.label[i]), sizeof(std::int32_t));
        if (mode == DuplicationMode::StructureLabel) {
            auto cols = a.row_cols(i);  // already sorted
            key.append(reinterpret_cast<const char*>(cols.data()), cols.size() * sizeof(NodeId));
        } else {
            key.append(reinterpret_cast<const char*>(x.row_ptr(i)), static_cast<std::size_t>(x.cols) * sizeof(double));
        }
        groups[key]++;
    }
    std::int64_t dup = 0;
    for (const auto& [_, g] : groups) dup += g - 1;
    return static_cast<double>(dup) / static_cast<double>(n);
}

}  // namespace ncgcn
