#include "ncgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ncgcn/error.hpp"

namespace ncgcn {

Variant variant_from_string(const std::string& name) {
    if (name == "full") return Variant::Full;
    if (name == "no_separation") return Variant::NoSeparation;
    if (name == "no_message_separation") return Variant::NoMessageSeparation;
    if (name == "nh_separation") return Variant::NhSeparation;
    throw ConfigError("unknown variant: " + name +
                      " (expected full, no_separation, no_message_separation or nh_separation)");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::NoSeparation: return "no_separation";
        case Variant::NoMessageSeparation: return "no_message_separation";
        case Variant::NhSeparation: return "nh_separation";
    }
    throw InternalError("to_string: bad variant value");
}

ModelParams::ModelParams(std::int64_t in, std::int64_t hidden, std::int64_t classes, Variant var, double dropout_low,
                         double dropout_high, double dropout_raw, Rng& rng)
    : low{ParamTensor("W1_low", in, hidden), ParamTensor("W2_low", hidden, hidden), ParamTensor("mix_low", 1, 1),
          dropout_low},
      high{ParamTensor("W1_high", in, hidden), ParamTensor("W2_high", hidden, hidden), ParamTensor("mix_high", 1, 1),
           dropout_high},
      wx("Wx", in, hidden),
      wo("Wo", hidden, classes),
      raw_dropout_rate(dropout_raw),
      in_dim(in),
      hidden_dim(hidden),
      num_classes(classes),
      variant(var) {
    if (in <= 0 || hidden <= 0 || classes <= 0) throw ConfigError("model dims must be positive");
    for (double r : {dropout_low, dropout_high, dropout_raw}) {
        if (!(r >= 0.0 && r < 1.0)) throw ConfigError("dropout rate must lie in [0,1)");
    }
    low.w1.glorot_init(rng);
    low.w2.glorot_init(rng);
    if (uses_high_channel()) {
        high.w1.glorot_init(rng);
        high.w2.glorot_init(rng);
    }
    wx.glorot_init(rng);
    wo.glorot_init(rng);
}

std::vector<ParamTensor*> ModelParams::trainable() {
    std::vector<ParamTensor*> out{&low.w1, &low.w2, &low.mix_logit};
    if (uses_high_channel()) {
        out.push_back(&high.w1);
        out.push_back(&high.w2);
        out.push_back(&high.mix_logit);
    }
    out.push_back(&wx);
    out.push_back(&wo);
    return out;
}

double ModelParams::alpha_low() const { return sigmoid(low.mix_logit.value.data[0]); }
double ModelParams::alpha_high() const { return sigmoid(high.mix_logit.value.data[0]); }

PropagationSet build_propagation(const CsrMatrix& s, const NodeMask& mask_low, const NodeMask& mask_high,
                                 std::int64_t mask_epoch) {
    if (s.n_rows != s.n_cols) throw InputError("build_propagation: adjacency must be square");
    if (static_cast<std::int64_t>(mask_low.size()) != s.n_rows || !masks_partition(mask_low, mask_high)) {
        throw InternalError("build_propagation: masks must partition the node set");
    }
    PropagationSet p;
    p.s = s;
    p.st = transpose(s);
    p.p1_low = apply_mask(s, mask_low, MaskSide::Rows);
    p.p1_high = apply_mask(s, mask_high, MaskSide::Rows);
    p.p2_low = apply_mask(p.p1_low, mask_low, MaskSide::Cols);
    p.p2_high = apply_mask(p.p1_high, mask_high, MaskSide::Cols);
    p.p1t_low = transpose(p.p1_low);
    p.p1t_high = transpose(p.p1_high);
    p.p2t_low = transpose(p.p2_low);
    p.p2t_high = transpose(p.p2_high);
    p.mask_low = mask_low;
    p.mask_high = mask_high;
    p.mask_epoch = mask_epoch;
    return p;
}

namespace {

DenseMatrix mask_rows_copy(const DenseMatrix& m, const NodeMask& keep) {
    DenseMatrix out = m;
    zero_masked_rows(out, keep.member);
    return out;
}

Rng& require_rng(Rng* rng) {
    if (rng == nullptr) throw InternalError("forward: dropout active but no rng supplied");
    return *rng;
}

void check_channel_locality(const DenseMatrix& h2, const NodeMask& group, const char* channel) {
    for (std::int64_t r = 0; r < h2.rows; ++r) {
        if (group[static_cast<std::size_t>(r)]) continue;
        const double* row = h2.row_ptr(r);
        for (std::int64_t c = 0; c < h2.cols; ++c) {
            if (row[c] != 0.0) {
                throw InternalError(std::string("channel locality violated: off-group node ") + std::to_string(r) +
                                    " has nonzero row in H2_" + channel);
            }
        }
    }
}

struct ChannelWiring {
    const CsrMatrix* p1;
    const CsrMatrix* p1t;
    const CsrMatrix* p2;
    const CsrMatrix* p2t;
    const NodeMask* group;
};

ChannelWiring wire_channel(const PropagationSet& prop, Variant variant, bool is_low) {
    ChannelWiring w{};
    w.group = is_low ? &prop.mask_low : &prop.mask_high;
    switch (variant) {
        case Variant::NoSeparation:
            w.p1 = w.p2 = &prop.s;
            w.p1t = w.p2t = &prop.st;
            break;
        case Variant::NoMessageSeparation:
            w.p1 = w.p2 = is_low ? &prop.p1_low : &prop.p1_high;
            w.p1t = w.p2t = is_low ? &prop.p1t_low : &prop.p1t_high;
            break;
        default:
            w.p1 = is_low ? &prop.p1_low : &prop.p1_high;
            w.p1t = is_low ? &prop.p1t_low : &prop.p1t_high;
            w.p2 = is_low ? &prop.p2_low : &prop.p2_high;
            w.p2t = is_low ? &prop.p2t_low : &prop.p2t_high;
            break;
    }
    return w;
}

void channel_layer1(ChannelCache& c, const ChannelParams& params, const ChannelWiring& w, const DenseMatrix& x,
                    bool train_mode, Rng* rng) {
    const DropoutPlan plan{params.dropout_rate, train_mode};
    if (plan.active()) {
        c.x_drop = dropout_forward(x, plan, require_rng(rng), c.x_keep);
    } else {
        c.x_drop = x;
        c.x_keep.clear();
    }
    c.h1 = relu_forward(spmm(*w.p1, matmul(c.x_drop, params.w1.value)));
}

void channel_layer2(ChannelCache& c, const ChannelParams& params, const ChannelWiring& w,
                    const DenseMatrix& h1_source, bool train_mode, Rng* rng) {
    const DropoutPlan plan{params.dropout_rate, train_mode};
    if (plan.active()) {
        c.h1_drop = dropout_forward(h1_source, plan, require_rng(rng), c.h1_keep);
    } else {
        c.h1_drop = h1_source;
        c.h1_keep.clear();
    }
    c.h2 = relu_forward(spmm(*w.p2, matmul(c.h1_drop, params.w2.value)));
}

// Mirrors channel_layer2 + channel_layer1 in reverse. Returns the gradient
// with respect to the layer-2 input (needed by the pooled variant); the
// layer-1 input is X, which carries no gradient.
DenseMatrix channel_backward_layer2(const DenseMatrix& d_h2, ChannelCache& c, ChannelParams& params,
                                    const ChannelWiring& w, bool train_mode) {
    const DropoutPlan plan{params.dropout_rate, train_mode};
    DenseMatrix d_a2 = relu_backward(d_h2, c.h2);
    DenseMatrix d_z2 = spmm(*w.p2t, d_a2);
    add_inplace(params.w2.grad, matmul_at_b(c.h1_drop, d_z2));
    DenseMatrix d_h1_drop = matmul_a_bt(d_z2, params.w2.value);
    return dropout_backward(d_h1_drop, plan, c.h1_keep);
}

void channel_backward_layer1(const DenseMatrix& d_h1, ChannelCache& c, ChannelParams& params,
                             const ChannelWiring& w) {
    DenseMatrix d_a1 = relu_backward(d_h1, c.h1);
    DenseMatrix d_z1 = spmm(*w.p1t, d_a1);
    add_inplace(params.w1.grad, matmul_at_b(c.x_drop, d_z1));
}

}  // namespace

ForwardCache forward(const ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                     const ForwardOptions& opt, Rng* rng) {
    if (x.rows != prop.s.n_rows) throw InputError("forward: feature rows != node count");
    if (x.cols != params.in_dim) throw InputError("forward: feature cols != model input dim");
    if (opt.expected_mask_epoch >= 0 && prop.mask_epoch != opt.expected_mask_epoch) {
        throw InternalError("forward: stale propagation set (mask epoch " + std::to_string(prop.mask_epoch) +
                            ", expected " + std::to_string(opt.expected_mask_epoch) + ")");
    }
    if (opt.check_invariants && !masks_partition(prop.mask_low, prop.mask_high)) {
        throw InternalError("forward: channel masks do not partition the node set");
    }

    ForwardCache cache;
    cache.train_mode = opt.train_mode;

    const DropoutPlan raw_plan{params.raw_dropout_rate, opt.train_mode};
    std::vector<std::uint8_t> raw_keep;
    cache.x_raw_drop = raw_plan.active() ? dropout_forward(x, raw_plan, require_rng(rng), raw_keep) : x;
    cache.hx = matmul(cache.x_raw_drop, params.wx.value);

    cache.alpha_low = params.alpha_low();
    cache.alpha_high = params.alpha_high();

    const ChannelWiring wl = wire_channel(prop, params.variant, true);
    const ChannelWiring wh = wire_channel(prop, params.variant, false);

    if (params.variant == Variant::NoSeparation) {
        channel_layer1(cache.low, params.low, wl, x, opt.train_mode, rng);
        channel_layer2(cache.low, params.low, wl, cache.low.h1, opt.train_mode, rng);
        DenseMatrix mo(cache.low.h2.rows, cache.low.h2.cols);
        const double a = cache.alpha_low;
        for (std::size_t i = 0; i < mo.data.size(); ++i) {
            mo.data[i] = a * cache.low.h2.data[i] + (1.0 - a) * cache.hx.data[i];
        }
        cache.ho_sum = std::move(mo);
    } else if (params.variant == Variant::NoMessageSeparation) {
        channel_layer1(cache.low, params.low, wl, x, opt.train_mode, rng);
        channel_layer1(cache.high, params.high, wh, x, opt.train_mode, rng);
        cache.h1_pooled = add(cache.low.h1, cache.high.h1);
        channel_layer2(cache.low, params.low, wl, cache.h1_pooled, opt.train_mode, rng);
        channel_layer2(cache.high, params.high, wh, cache.h1_pooled, opt.train_mode, rng);
    } else {
        channel_layer1(cache.low, params.low, wl, x, opt.train_mode, rng);
        channel_layer2(cache.low, params.low, wl, cache.low.h1, opt.train_mode, rng);
        channel_layer1(cache.high, params.high, wh, x, opt.train_mode, rng);
        channel_layer2(cache.high, params.high, wh, cache.high.h1, opt.train_mode, rng);
    }

    if (params.variant != Variant::NoSeparation) {
        if (opt.check_invariants) {
            check_channel_locality(cache.low.h2, prop.mask_low, "low");
            check_channel_locality(cache.high.h2, prop.mask_high, "high");
        }
        DenseMatrix ho_sum(x.rows, params.hidden_dim);
        auto mix_into = [&](const ChannelCache& c, double a, const NodeMask& group) {
            for (std::int64_t r = 0; r < ho_sum.rows; ++r) {
                if (!params.literal_output_mix && !group[static_cast<std::size_t>(r)]) continue;
                double* dst = ho_sum.row_ptr(r);
                const double* h2row = c.h2.row_ptr(r);
                const double* hxrow = cache.hx.row_ptr(r);
                for (std::int64_t j = 0; j < ho_sum.cols; ++j) dst[j] += a * h2row[j] + (1.0 - a) * hxrow[j];
            }
        };
        mix_into(cache.low, cache.alpha_low, prop.mask_low);
        mix_into(cache.high, cache.alpha_high, prop.mask_high);
        cache.ho_sum = std::move(ho_sum);
    }

    cache.logits = matmul(cache.ho_sum, params.wo.value);
    cache.probs = row_softmax(cache.logits);
    return cache;
}

namespace {

void backward(ModelParams& params, const PropagationSet& prop, ForwardCache& cache, const DenseMatrix& d_logits) {
    add_inplace(params.wo.grad, matmul_at_b(cache.ho_sum, d_logits));
    DenseMatrix d_ho_sum = matmul_a_bt(d_logits, params.wo.value);

    const ChannelWiring wl = wire_channel(prop, params.variant, true);
    const ChannelWiring wh = wire_channel(prop, params.variant, false);

    DenseMatrix d_hx(cache.hx.rows, cache.hx.cols);

    auto mix_backward = [&](ChannelCache& c, ChannelParams& cp, const NodeMask& group) {
        const DenseMatrix d_mo = (params.literal_output_mix || params.variant == Variant::NoSeparation)
                                     ? d_ho_sum
                                     : mask_rows_copy(d_ho_sum, group);
        auto [d_h2, d_hx_part] = scalar_mix_backward(d_mo, c.h2, cache.hx, cp.mix_logit);
        add_inplace(d_hx, d_hx_part);
        return d_h2;
    };

    if (params.variant == Variant::NoSeparation) {
        DenseMatrix d_h2 = mix_backward(cache.low, params.low, prop.mask_low);
        DenseMatrix d_h1 = channel_backward_layer2(d_h2, cache.low, params.low, wl, cache.train_mode);
        channel_backward_layer1(d_h1, cache.low, params.low, wl);
    } else if (params.variant == Variant::NoMessageSeparation) {
        DenseMatrix d_h2_low = mix_backward(cache.low, params.low, prop.mask_low);
        DenseMatrix d_h2_high = mix_backward(cache.high, params.high, prop.mask_high);
        DenseMatrix d_h1_pooled = channel_backward_layer2(d_h2_low, cache.low, params.low, wl, cache.train_mode);
        add_inplace(d_h1_pooled, channel_backward_layer2(d_h2_high, cache.high, params.high, wh, cache.train_mode));
        channel_backward_layer1(d_h1_pooled, cache.low, params.low, wl);
        channel_backward_layer1(d_h1_pooled, cache.high, params.high, wh);
    } else {
        DenseMatrix d_h2_low = mix_backward(cache.low, params.low, prop.mask_low);
        DenseMatrix d_h1_low = channel_backward_layer2(d_h2_low, cache.low, params.low, wl, cache.train_mode);
        channel_backward_layer1(d_h1_low, cache.low, params.low, wl);
        DenseMatrix d_h2_high = mix_backward(cache.high, params.high, prop.mask_high);
        DenseMatrix d_h1_high = channel_backward_layer2(d_h2_high, cache.high, params.high, wh, cache.train_mode);
        channel_backward_layer1(d_h1_high, cache.high, params.high, wh);
    }

    add_inplace(params.wx.grad, matmul_at_b(cache.x_raw_drop, d_hx));
}

}  // namespace

LossResult loss_and_grads(ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                          const LabelVector& labels, const std::vector<std::int64_t>& train_idx,
                          LossReduction reduction, Rng* rng, const ForwardOptions& opt) {
    if (train_idx.empty()) throw InputError("loss_and_grads: empty training index set");
    for (ParamTensor* p : params.trainable()) p->zero_grad();

    ForwardOptions fw = opt;
    fw.train_mode = true;
    ForwardCache cache = forward(params, prop, x, fw, rng);

    SoftmaxXentResult xent = softmax_xent(cache.logits, labels, train_idx, reduction);
    backward(params, prop, cache, xent.d_logits);

    LossResult res;
    res.loss = xent.loss;
    res.probs = std::move(xent.probs);
    res.pseudo.num_classes = labels.num_classes;
    res.pseudo.label.resize(static_cast<std::size_t>(res.probs.rows));
    for (std::int64_t r = 0; r < res.probs.rows; ++r) {
        const double* row = res.probs.row_ptr(r);
        res.pseudo.label[static_cast<std::size_t>(r)] =
            static_cast<std::int32_t>(std::max_element(row, row + res.probs.cols) - row);
    }
    return res;
}

DenseMatrix gcn_reference(const CsrMatrix& s, const DenseMatrix& x, const DenseMatrix& w1, const DenseMatrix& w2,
                          double dropout_rate, bool train_mode, Rng* rng) {
    const DropoutPlan plan{dropout_rate, train_mode};
    std::vector<std::uint8_t> keep;
    const DenseMatrix& x_in = x;
    DenseMatrix x_dropped;
    if (plan.active()) x_dropped = dropout_forward(x, plan, require_rng(rng), keep);
    DenseMatrix h1 = relu_forward(spmm(s, matmul(plan.active() ? x_dropped : x_in, w1)));
    if (plan.active()) h1 = dropout_forward(h1, plan, require_rng(rng), keep);
    return row_softmax(spmm(s, matmul(h1, w2)));
}

DenseMatrix mlp_reference(const DenseMatrix& x, const DenseMatrix& w1, const DenseMatrix& w2) {
    return row_softmax(matmul(relu_forward(matmul(x, w1)), w2));
}

}  // namespace ncgcn
