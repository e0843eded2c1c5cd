#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ncgcn/rng.hpp"
#include "ncgcn/tensor.hpp"

namespace ncgcn {

// One probed coordinate: analytic gradient vs central difference.
struct GradCheckEntry {
    std::string tensor;
    std::int64_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_error = 0.0;
    bool passed = false;
};

// loss_fn must recompute the loss from current parameter values and, when
// asked, refresh the .grad fields. It owns whatever forward state it needs.
using LossFn = std::function<double(bool compute_grads)>;

// Central differences with step h on up to samples_per_tensor coordinates per
// tensor (all coordinates when the tensor is small). Relative error uses
// |a - n| / max(|a|, |n|, floor).
GradCheckReport finite_diff_check(const LossFn& loss_fn, const std::vector<ParamTensor*>& params, double h,
                                  double tolerance, std::int64_t samples_per_tensor, Rng& rng);

struct ModelGradCase {
    std::string name;
    double max_rel_error = 0.0;
    bool passed = false;
};

// End-to-end derivative audit: every model variant (plus the literal
// output-mix mode), with and without dropout, on small random graphs with
// random channel masks; every tensor coordinate is probed. Dropout cases
// replay the same keep masks on each loss evaluation by reseeding.
std::vector<ModelGradCase> model_grad_suite(std::uint64_t seed, double h = 1e-4, double tolerance = 1e-4);

}  // namespace ncgcn
