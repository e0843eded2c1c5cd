#include "ncgcn/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncgcn/error.hpp"

namespace ncgcn {

DenseMatrix linear_forward(const DenseMatrix& x, const ParamTensor& w) { return matmul(x, w.value); }

DenseMatrix linear_backward(const DenseMatrix& d_out, const DenseMatrix& x, ParamTensor& w) {
    add_inplace(w.grad, matmul_at_b(x, d_out));
    return matmul_a_bt(d_out, w.value);
}

DenseMatrix relu_forward(const DenseMatrix& h) {
    DenseMatrix out = h;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

DenseMatrix relu_backward(const DenseMatrix& d_out, const DenseMatrix& activation) {
    if (!d_out.same_shape(activation)) throw InputError("relu_backward: shape mismatch");
    DenseMatrix dx = d_out;
    for (std::size_t i = 0; i < dx.data.size(); ++i) {
        if (activation.data[i] <= 0.0) dx.data[i] = 0.0;
    }
    return dx;
}

DenseMatrix dropout_forward(const DenseMatrix& h, const DropoutPlan& plan, Rng& rng,
                            std::vector<std::uint8_t>& keep_mask_out) {
    if (!(plan.rate >= 0.0 && plan.rate < 1.0)) {
        throw ConfigError("dropout: rate must lie in [0,1), got " + std::to_string(plan.rate));
    }
    if (!plan.active()) {
        keep_mask_out.clear();
        return h;
    }
    const double keep_p = 1.0 - plan.rate;
    const double inv_keep = 1.0 / keep_p;
    keep_mask_out.resize(h.data.size());
    DenseMatrix out = h;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const bool keep = rng.uniform() < keep_p;
        keep_mask_out[i] = keep;
        out.data[i] = keep ? out.data[i] * inv_keep : 0.0;
    }
    return out;
}

DenseMatrix dropout_backward(const DenseMatrix& d_out, const DropoutPlan& plan,
                             const std::vector<std::uint8_t>& keep_mask) {
    if (!plan.active()) return d_out;
    if (keep_mask.size() != d_out.data.size()) throw InternalError("dropout_backward: stale keep mask");
    const double inv_keep = 1.0 / (1.0 - plan.rate);
    DenseMatrix dx = d_out;
    for (std::size_t i = 0; i < dx.data.size(); ++i) dx.data[i] = keep_mask[i] ? dx.data[i] * inv_keep : 0.0;
    return dx;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

DenseMatrix scalar_mix_forward(const DenseMatrix& h2, const DenseMatrix& hx, const ParamTensor& mix_logit) {
    if (!h2.same_shape(hx)) throw InputError("scalar_mix: shape mismatch");
    const double alpha = sigmoid(mix_logit.value.data[0]);
    DenseMatrix out(h2.rows, h2.cols);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = alpha * h2.data[i] + (1.0 - alpha) * hx.data[i];
    return out;
}

std::pair<DenseMatrix, DenseMatrix> scalar_mix_backward(const DenseMatrix& d_out, const DenseMatrix& h2,
                                                        const DenseMatrix& hx, ParamTensor& mix_logit) {
    if (!h2.same_shape(hx) || !d_out.same_shape(h2)) throw InputError("scalar_mix_backward: shape mismatch");
    const double alpha = sigmoid(mix_logit.value.data[0]);
    DenseMatrix dh2 = d_out;
    DenseMatrix dhx = d_out;
    double d_alpha = 0.0;
    for (std::size_t i = 0; i < d_out.data.size(); ++i) {
        d_alpha += d_out.data[i] * (h2.data[i] - hx.data[i]);
        dh2.data[i] *= alpha;
        dhx.data[i] *= 1.0 - alpha;
    }
    mix_logit.grad.data[0] += d_alpha * alpha * (1.0 - alpha);
    return {std::move(dh2), std::move(dhx)};
}

SoftmaxXentResult softmax_xent(const DenseMatrix& logits, const LabelVector& labels,
                               const std::vector<std::int64_t>& loss_nodes, LossReduction reduction) {
    if (loss_nodes.empty()) throw ConfigError("softmax_xent: empty loss node set");
    if (logits.rows != labels.size()) throw InputError("softmax_xent: logits/labels row mismatch");
    if (logits.cols != labels.num_classes) throw InputError("softmax_xent: logits cols != class count");

    SoftmaxXentResult res;
    res.probs = DenseMatrix(logits.rows, logits.cols);
    std::vector<double> log_norm(static_cast<std::size_t>(logits.rows));  // log sum exp per row

    for (std::int64_t r = 0; r < logits.rows; ++r) {
        const double* in = logits.row_ptr(r);
        double* out = res.probs.row_ptr(r);
        const double row_max = *std::max_element(in, in + logits.cols);
        double sum = 0.0;
        for (std::int64_t c = 0; c < logits.cols; ++c) {
            out[c] = std::exp(in[c] - row_max);
            sum += out[c];
        }
        for (std::int64_t c = 0; c < logits.cols; ++c) out[c] /= sum;
        log_norm[static_cast<std::size_t>(r)] = row_max + std::log(sum);
    }

    res.d_logits = DenseMatrix(logits.rows, logits.cols);
    const double scale =
        reduction == LossReduction::Mean ? 1.0 / static_cast<double>(loss_nodes.size()) : 1.0;
    double loss = 0.0;
    for (std::int64_t i : loss_nodes) {
        if (i < 0 || i >= logits.rows) throw InputError("softmax_xent: loss node out of range");
        const std::int32_t y = labels.label[static_cast<std::size_t>(i)];
        loss -= logits.at(i, y) - log_norm[static_cast<std::size_t>(i)];
        double* drow = res.d_logits.row_ptr(i);
        const double* prow = res.probs.row_ptr(i);
        for (std::int64_t c = 0; c < logits.cols; ++c) drow[c] = prow[c] * scale;
        drow[y] -= scale;
    }
    res.loss = loss * scale;
    return res;
}

DenseMatrix row_softmax(const DenseMatrix& logits) {
    DenseMatrix out(logits.rows, logits.cols);
    for (std::int64_t r = 0; r < logits.rows; ++r) {
        const double* in = logits.row_ptr(r);
        double* dst = out.row_ptr(r);
        const double row_max = *std::max_element(in, in + logits.cols);
        double sum = 0.0;
        for (std::int64_t c = 0; c < logits.cols; ++c) {
            dst[c] = std::exp(in[c] - row_max);
            sum += dst[c];
        }
        for (std::int64_t c = 0; c < logits.cols; ++c) dst[c] /= sum;
    }
    return out;
}

void adam_step(const std::vector<ParamTensor*>& params, double lr, double weight_decay, double beta1, double beta2,
               double eps) {
    for (ParamTensor* p : params) {
        if (!p->grad.all_finite()) throw TrainingError("adam_step: non-finite gradient in " + p->name);
        p->step_count++;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(p->step_count));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(p->step_count));
        for (std::size_t i = 0; i < p->value.data.size(); ++i) {
            const double g = p->grad.data[i] + weight_decay * p->value.data[i];
            p->adam_m.data[i] = beta1 * p->adam_m.data[i] + (1.0 - beta1) * g;
            p->adam_v.data[i] = beta2 * p->adam_v.data[i] + (1.0 - beta2) * g * g;
            const double m_hat = p->adam_m.data[i] / bc1;
            const double v_hat = p->adam_v.data[i] / bc2;
            p->value.data[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
        p->zero_grad();
    }
}

}  // namespace ncgcn
