#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ncgcn/dense.hpp"
#include "ncgcn/labels.hpp"
#include "ncgcn/rng.hpp"
#include "ncgcn/tensor.hpp"

namespace ncgcn {

// Dense primitives for the fixed two-layer architecture. Each forward has a
// matching hand-derived backward; the model code stitches them into a tape by
// keeping the forward operands alive and replaying in reverse order.

/// forward: X * W.
DenseMatrix linear_forward(const DenseMatrix& x, const ParamTensor& w);

/// dX = dOut * W^T; accumulates dW += X^T * dOut into w.grad.
DenseMatrix linear_backward(const DenseMatrix& d_out, const DenseMatrix& x, ParamTensor& w);

/// Elementwise max(0, h).
DenseMatrix relu_forward(const DenseMatrix& h);

/// Gates dOut on activation > 0 (gradient at exactly 0 is 0).
DenseMatrix relu_backward(const DenseMatrix& d_out, const DenseMatrix& activation);

/// Inverted dropout. In eval mode (or rate 0) the plan is the identity and no
/// random draws are consumed; in train mode kept entries are scaled by
/// 1/(1-rate). The keep mask is sampled once per forward and reused exactly
/// in backward.
struct DropoutPlan {
    double rate = 0.0;
    bool train_mode = false;

    bool active() const { return train_mode && rate > 0.0; }
};

DenseMatrix dropout_forward(const DenseMatrix& h, const DropoutPlan& plan, Rng& rng,
                            std::vector<std::uint8_t>& keep_mask_out);

DenseMatrix dropout_backward(const DenseMatrix& d_out, const DropoutPlan& plan,
                             const std::vector<std::uint8_t>& keep_mask);

/// out = sigmoid(mix_logit) * h2 + (1 - sigmoid(mix_logit)) * hx. The logit
/// parameterization keeps the mixture a valid convex combination.
DenseMatrix scalar_mix_forward(const DenseMatrix& h2, const DenseMatrix& hx, const ParamTensor& mix_logit);

/// Returns (dH2, dHx); accumulates d(logit) = a(1-a) * sum(dOut .* (h2-hx)).
std::pair<DenseMatrix, DenseMatrix> scalar_mix_backward(const DenseMatrix& d_out, const DenseMatrix& h2,
                                                        const DenseMatrix& hx, ParamTensor& mix_logit);

double sigmoid(double x);

enum class LossReduction { Mean, Sum };

struct SoftmaxXentResult {
    double loss = 0.0;
    DenseMatrix probs;     // row-softmax over all n rows
    DenseMatrix d_logits;  // zero outside loss_nodes
};

/// Numerically stable row softmax + cross entropy over `loss_nodes`.
/// d_logits = (B - Y) on loss rows (scaled by 1/|loss_nodes| for Mean).
SoftmaxXentResult softmax_xent(const DenseMatrix& logits, const LabelVector& labels,
                               const std::vector<std::int64_t>& loss_nodes, LossReduction reduction);

/// Row softmax with max subtraction, no loss attached.
DenseMatrix row_softmax(const DenseMatrix& logits);

/// Standard Adam with bias correction. Weight decay enters as an L2 term on
/// the gradient (g += wd*theta) before the moment updates; grads are zeroed
/// afterwards. Throws TrainingError (naming the tensor) on non-finite grads.
void adam_step(const std::vector<ParamTensor*>& params, double lr, double weight_decay, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

}  // namespace ncgcn
