#include <cstdint>
#include <string>
#include <vector>

#include "ncgcn/grad_check.hpp"
#include "ncgcn/model.hpp"
#include "ncgcn/nn_ops.hpp"
#include "ncgcn/sbm.hpp"

namespace ncgcn {

namespace {

struct SuiteCase {
    Variant variant;
    bool dropout;
    bool literal;
    const char* name;
};

constexpr SuiteCase kCases[] = {
    {Variant::Full, false, false, "full"},
    {Variant::Full, true, false, "full+dropout"},
    {Variant::Full, false, true, "full+literal_mix"},
    {Variant::NoSeparation, false, false, "no_separation"},
    {Variant::NoSeparation, true, false, "no_separation+dropout"},
    {Variant::NoMessageSeparation, false, false, "no_message_separation"},
    {Variant::NoMessageSeparation, true, false, "no_message_separation+dropout"},
    {Variant::NhSeparation, false, false, "nh_separation"},
    {Variant::NhSeparation, true, false, "nh_separation+dropout"},
};

}  // namespace

std::vector<ModelGradCase> model_grad_suite(std::uint64_t seed, double h, double tolerance) {
    std::vector<ModelGradCase> out;
    Rng seeder(seed, RngStream::GradCheck);

    for (const SuiteCase& sc : kCases) {
        const std::uint64_t case_seed = seeder.next_u64();

        SbmSpec spec;
        spec.n = 12;
        spec.num_classes = 3;
        spec.p_in = 0.5;
        spec.p_out = 0.25;
        spec.feature_dim = 5;
        spec.feature_noise = 0.5;
        spec.seed = case_seed;
        Dataset data = gen_sbm(spec);

        Rng mask_rng(case_seed, RngStream::Generic);
        NodeMask low(static_cast<std::size_t>(spec.n));
        NodeMask high(static_cast<std::size_t>(spec.n));
        for (std::int64_t i = 0; i < spec.n; ++i) {
            bool is_low = mask_rng.bernoulli(0.5);
            if (i == 0) is_low = true;
            if (i == 1) is_low = false;
            low.set(static_cast<std::size_t>(i), is_low);
            high.set(static_cast<std::size_t>(i), !is_low);
        }
        const CsrMatrix s = symmetric_normalize(data.a, true);
        const PropagationSet prop = build_propagation(s, low, high);

        const double rate_low = sc.dropout ? 0.3 : 0.0;
        const double rate_high = sc.dropout ? 0.2 : 0.0;
        const double rate_raw = sc.dropout ? 0.1 : 0.0;
        Rng init_rng(case_seed, RngStream::WeightInit);
        ModelParams params(spec.feature_dim, 6, spec.num_classes, sc.variant, rate_low, rate_high, rate_raw,
                           init_rng);
        params.literal_output_mix = sc.literal;
        params.low.mix_logit.value.data[0] = 0.2;
        params.high.mix_logit.value.data[0] = -0.3;

        std::vector<std::int64_t> train_idx = {0, 2, 4, 6, 8, 10};
        const std::uint64_t dropout_seed = case_seed ^ 0x5bd1e995u;

        LossFn loss_fn = [&](bool compute_grads) {
            Rng dropout_rng(dropout_seed, RngStream::Dropout);
            if (compute_grads) {
                return loss_and_grads(params, prop, data.x, data.labels, train_idx, LossReduction::Mean,
                                      &dropout_rng)
                    .loss;
            }
            ForwardOptions opt;
            opt.train_mode = true;
            ForwardCache cache = forward(params, prop, data.x, opt, &dropout_rng);
            return softmax_xent(cache.logits, data.labels, train_idx, LossReduction::Mean).loss;
        };

        Rng pick_rng(case_seed, RngStream::GradCheck);
        GradCheckReport report =
            finite_diff_check(loss_fn, params.trainable(), h, tolerance, 4096, pick_rng);

        ModelGradCase result;
        result.name = sc.name;
        result.max_rel_error = report.max_rel_error;
        result.passed = report.passed;
        out.push_back(std::move(result));
    }
    return out;
}

}  // namespace ncgcn
