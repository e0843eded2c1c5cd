#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncgcn/csr.hpp"
#include "ncgcn/dense.hpp"
#include "ncgcn/labels.hpp"
#include "ncgcn/nn_ops.hpp"
#include "ncgcn/rng.hpp"
#include "ncgcn/tensor.hpp"

namespace ncgcn {

enum class Variant { Full, NoSeparation, NoMessageSeparation, NhSeparation };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant v);

struct ChannelParams {
    ParamTensor w1;         // in_dim x hidden
    ParamTensor w2;         // hidden x hidden
    ParamTensor mix_logit;  // scalar, starts at 0 so the mix weight starts at 1/2
    double dropout_rate = 0.0;
};

struct ModelParams {
    ChannelParams low, high;
    ParamTensor wx;  // in_dim x hidden, raw-feature branch, shared
    ParamTensor wo;  // hidden x num_classes, shared readout
    double raw_dropout_rate = 0.0;
    std::int64_t in_dim = 0;
    std::int64_t hidden_dim = 0;
    std::int64_t num_classes = 0;
    Variant variant = Variant::Full;
    // Compatibility switch: when set, the per-channel outputs are summed
    // without row masking, so the raw branch reaches every node from both
    // channels. Default keeps each node on exactly one channel.
    bool literal_output_mix = false;

    ModelParams() = default;
    ModelParams(std::int64_t in_dim, std::int64_t hidden_dim, std::int64_t num_classes, Variant variant,
                double dropout_low, double dropout_high, double dropout_raw, Rng& rng);

    bool uses_high_channel() const { return variant != Variant::NoSeparation; }
    std::vector<ParamTensor*> trainable();
    double alpha_low() const;
    double alpha_high() const;
};

/// Masked views of the normalized adjacency, rebuilt whenever the channel
/// masks move. p1_* keep only in-group target rows; p2_* additionally keep
/// only in-group source columns. Transposes are materialized for the backward
/// pass so nothing assumes symmetry.
struct PropagationSet {
    CsrMatrix s, st;
    CsrMatrix p1_low, p1_high;
    CsrMatrix p1t_low, p1t_high;
    CsrMatrix p2_low, p2_high;
    CsrMatrix p2t_low, p2t_high;
    NodeMask mask_low, mask_high;
    std::int64_t mask_epoch = 0;
};

PropagationSet build_propagation(const CsrMatrix& s, const NodeMask& mask_low, const NodeMask& mask_high,
                                 std::int64_t mask_epoch = 0);

struct ChannelCache {
    DenseMatrix x_drop;
    std::vector<std::uint8_t> x_keep;
    DenseMatrix h1;
    DenseMatrix h1_drop;
    std::vector<std::uint8_t> h1_keep;
    DenseMatrix h2;
};

struct ForwardCache {
    bool train_mode = false;
    ChannelCache low, high;
    DenseMatrix h1_pooled;  // only for the pooled-message variant
    DenseMatrix x_raw_drop;
    DenseMatrix hx;
    DenseMatrix ho_sum;
    DenseMatrix logits;
    DenseMatrix probs;
    double alpha_low = 0.5;
    double alpha_high = 0.5;
};

struct ForwardOptions {
    bool train_mode = false;
    bool check_invariants = false;
    std::int64_t expected_mask_epoch = -1;  // -1 skips the staleness check
};

/// Full forward pass. rng is only consumed when train_mode is set and some
/// dropout rate is positive; draw order is fixed (raw branch, then low
/// channel, then high channel; pooled variant draws both layer-1 masks before
/// the layer-2 ones).
ForwardCache forward(const ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                     const ForwardOptions& opt, Rng* rng = nullptr);

struct LossResult {
    double loss = 0.0;
    LabelVector pseudo;  // argmax of the train-mode predictions, all nodes
    DenseMatrix probs;
};

/// Train-mode forward + cross-entropy on train_idx + backward into every
/// trainable tensor's .grad (grads are reset first, not accumulated across
/// calls). Pseudo-label ties resolve to the smallest class id.
LossResult loss_and_grads(ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                          const LabelVector& labels, const std::vector<std::int64_t>& train_idx,
                          LossReduction reduction, Rng* rng, const ForwardOptions& opt = {});

/// Two-layer GCN baseline: softmax(S * relu(S * X * W1) * W2), no biases.
DenseMatrix gcn_reference(const CsrMatrix& s, const DenseMatrix& x, const DenseMatrix& w1, const DenseMatrix& w2,
                          double dropout_rate = 0.0, bool train_mode = false, Rng* rng = nullptr);

/// Two-layer MLP baseline: softmax(relu(X * W1) * W2).
DenseMatrix mlp_reference(const DenseMatrix& x, const DenseMatrix& w1, const DenseMatrix& w2);

}  // namespace ncgcn
