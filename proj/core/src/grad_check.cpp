#include "ncgcn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "ncgcn/error.hpp"

namespace ncgcn {

GradCheckReport finite_diff_check(const LossFn& loss_fn, const std::vector<ParamTensor*>& params, double h,
                                  double tolerance, std::int64_t samples_per_tensor, Rng& rng) {
    if (h <= 0.0) throw ConfigError("finite_diff_check: step must be positive");

    for (ParamTensor* p : params) p->zero_grad();
    loss_fn(true);

    GradCheckReport report;
    for (ParamTensor* p : params) {
        const std::int64_t n = p->numel();
        std::vector<std::int64_t> picks;
        if (n <= samples_per_tensor) {
            picks.resize(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) picks[static_cast<std::size_t>(i)] = i;
        } else {
            // sample without replacement
            std::vector<std::int64_t> all(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
            rng.shuffle(all);
            picks.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(samples_per_tensor));
            std::sort(picks.begin(), picks.end());
        }

        for (std::int64_t idx : picks) {
            const double analytic = p->grad.data[static_cast<std::size_t>(idx)];
            const double saved = p->value.data[static_cast<std::size_t>(idx)];

            p->value.data[static_cast<std::size_t>(idx)] = saved + h;
            const double loss_plus = loss_fn(false);
            p->value.data[static_cast<std::size_t>(idx)] = saved - h;
            const double loss_minus = loss_fn(false);
            p->value.data[static_cast<std::size_t>(idx)] = saved;

            const double numeric = (loss_plus - loss_minus) / (2.0 * h);
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            GradCheckEntry e;
            e.tensor = p->name;
            e.index = idx;
            e.analytic = analytic;
            e.numeric = numeric;
            e.rel_error = std::abs(analytic - numeric) / denom;
            report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
            report.entries.push_back(std::move(e));
        }
    }
    report.passed = report.max_rel_error <= tolerance;
    return report;
}

}  // namespace ncgcn
