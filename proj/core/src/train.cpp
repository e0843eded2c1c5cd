#include "ncgcn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ncgcn/error.hpp"
#include "ncgcn/khop.hpp"
#include "ncgcn/rng.hpp"

namespace ncgcn {

NcLabelSource nc_label_source_from_string(const std::string& name) {
    if (name == "pseudo_all") return NcLabelSource::PseudoAll;
    if (name == "truth_train_pseudo_rest") return NcLabelSource::TruthTrainPseudoRest;
    throw ConfigError("unknown nc_label_source: " + name + " (expected pseudo_all or truth_train_pseudo_rest)");
}

std::string to_string(NcLabelSource v) {
    return v == NcLabelSource::PseudoAll ? "pseudo_all" : "truth_train_pseudo_rest";
}

void TrainConfig::validate() const {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite non-negative real");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
        throw ConfigError("weight_decay must be a finite non-negative real");
    }
    for (double r : {dropout_low, dropout_high, dropout_raw}) {
        if (!(r >= 0.0 && r < 1.0)) throw ConfigError("dropout rates must lie in [0,1)");
    }
    if (hidden < 1) throw ConfigError("hidden must be at least 1");
    if (k != 1 && k != 2) throw ConfigError("k must be 1 or 2");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("threshold must lie in the open interval (0,1), got " + std::to_string(threshold));
    }
    if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
    if (patience < 1) throw ConfigError("patience must be at least 1");
}

namespace {

LabelVector argmax_labels(const DenseMatrix& probs, std::int32_t num_classes) {
    LabelVector out;
    out.num_classes = num_classes;
    out.label.resize(static_cast<std::size_t>(probs.rows));
    for (std::int64_t r = 0; r < probs.rows; ++r) {
        const double* row = probs.row_ptr(r);
        out.label[static_cast<std::size_t>(r)] =
            static_cast<std::int32_t>(std::max_element(row, row + probs.cols) - row);
    }
    return out;
}

double accuracy_over(const DenseMatrix& probs, const LabelVector& truth, const std::vector<std::int64_t>& idx) {
    if (idx.empty()) throw InputError("accuracy: empty index set");
    std::int64_t hits = 0;
    for (std::int64_t i : idx) {
        const double* row = probs.row_ptr(i);
        const auto pred = static_cast<std::int32_t>(std::max_element(row, row + probs.cols) - row);
        if (pred == truth.label[static_cast<std::size_t>(i)]) hits++;
    }
    return static_cast<double>(hits) / static_cast<double>(idx.size());
}

/// NaN when no index from idx falls inside the group.
double group_accuracy(const DenseMatrix& probs, const LabelVector& truth, const std::vector<std::int64_t>& idx,
                      const NodeMask& group) {
    std::int64_t hits = 0, total = 0;
    for (std::int64_t i : idx) {
        if (!group[static_cast<std::size_t>(i)]) continue;
        total++;
        const double* row = probs.row_ptr(i);
        const auto pred = static_cast<std::int32_t>(std::max_element(row, row + probs.cols) - row);
        if (pred == truth.label[static_cast<std::size_t>(i)]) hits++;
    }
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(hits) / static_cast<double>(total);
}

struct ConfusionRules {
    bool use_nh = false;          // nh variant splits on homophily instead
    double mask_threshold = 0.5;  // fixed 0.5 for the homophily split
};

MetricVector compute_metric(const ConfusionRules& rules, const KHopIndex& nc_index, const KHopIndex& nh_index,
                            const LabelVector& labels) {
    return rules.use_nh ? node_homophily(nh_index, labels) : neighborhood_confusion(nc_index, labels);
}

std::pair<NodeMask, NodeMask> masks_for(const ConfusionRules& rules, const MetricVector& m) {
    return rules.use_nh ? nh_masks(m, rules.mask_threshold) : build_masks(m, rules.mask_threshold);
}

}  // namespace

double evaluate(const ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                const LabelVector& labels, const std::vector<std::int64_t>& idx) {
    ForwardOptions opt;
    ForwardCache cache = forward(params, prop, x, opt);
    return accuracy_over(cache.probs, labels, idx);
}

RunResult train(const TrainConfig& cfg, const Dataset& data) {
    cfg.validate();
    data.validate();
    if (data.num_classes() < 2) throw DataError("train: need at least 2 classes");

    const std::int64_t n = data.n();
    Splits splits = make_splits(data.labels, cfg.seed);
    if (splits.train.empty() || splits.val.empty() || splits.test.empty()) {
        throw DataError("train: a split came out empty (n too small)");
    }

    const KHopIndex nc_index = khop_index(data.a, cfg.k);
    const KHopIndex nh_index = cfg.k == 1 ? nc_index : khop_index(data.a, 1);
    const CsrMatrix s = symmetric_normalize(data.a, cfg.add_self_loop);

    ConfusionRules rules;
    rules.use_nh = cfg.variant == Variant::NhSeparation;
    rules.mask_threshold = rules.use_nh ? 0.5 : cfg.threshold;

    // Ground-truth reference masks: NC groups for reporting, and the matching
    // metric's high mask as the recall target.
    const MetricVector truth_nc = neighborhood_confusion(nc_index, data.labels);
    const auto [truth_low, truth_high] = build_masks(truth_nc, cfg.threshold);
    const MetricVector truth_metric = compute_metric(rules, nc_index, nh_index, data.labels);
    const NodeMask recall_target = masks_for(rules, truth_metric).second;

    Rng init_rng(cfg.seed, RngStream::WeightInit);
    ModelParams params(data.feature_dim(), cfg.hidden, data.num_classes(), cfg.variant, cfg.dropout_low,
                       cfg.dropout_high, cfg.dropout_raw, init_rng);
    params.literal_output_mix = cfg.literal_output_mix;
    Rng dropout_rng(cfg.seed, RngStream::Dropout);

    NcState state;
    state.k = cfg.k;
    state.threshold = rules.mask_threshold;
    state.nc.kind = rules.use_nh ? MetricKind::NH : MetricKind::NC;
    state.nc.value.assign(static_cast<std::size_t>(n), rules.use_nh ? 1.0 : 0.0);
    state.mask_low = NodeMask(static_cast<std::size_t>(n), true);
    state.mask_high = NodeMask(static_cast<std::size_t>(n), false);

    std::int64_t mask_epoch = 0;
    PropagationSet prop = build_propagation(s, state.mask_low, state.mask_high, mask_epoch);

    RunResult res;
    res.seed = cfg.seed;
    res.split_digest = split_hash(splits);

    double acc_max = 0.0;
    std::int64_t since_improve = 0;
    ModelParams best_params = params;
    NodeMask best_mask_low = state.mask_low;
    NodeMask best_mask_high = state.mask_high;
    std::int64_t best_mask_epoch = mask_epoch;

    for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        ForwardOptions opts;
        opts.check_invariants = cfg.check_invariants;
        opts.expected_mask_epoch = mask_epoch;

        LossResult step = loss_and_grads(params, prop, data.x, data.labels, splits.train, cfg.reduction,
                                         &dropout_rng, opts);
        if (!std::isfinite(step.loss)) {
            throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                " (lr " + std::to_string(cfg.lr) + ")");
        }
        std::vector<ParamTensor*> tensors = params.trainable();
        adam_step(tensors, cfg.lr, cfg.weight_decay);

        ForwardOptions eval_opts = opts;
        eval_opts.train_mode = false;
        ForwardCache eval_cache = forward(params, prop, data.x, eval_opts);
        const double acc_val = accuracy_over(eval_cache.probs, data.labels, splits.val);

        EpochRecord rec;
        rec.loss = step.loss;
        rec.val_accuracy = acc_val;
        rec.high_count = state.mask_high.count();
        rec.recall_high = mask_recall(state.mask_high, recall_target);
        rec.low_group_val_accuracy = group_accuracy(eval_cache.probs, data.labels, splits.val, truth_low);
        rec.high_group_val_accuracy = group_accuracy(eval_cache.probs, data.labels, splits.val, truth_high);

        if (acc_val > acc_max) {
            acc_max = acc_val;
            res.best_epoch = epoch;
            best_params = params;
            best_mask_low = state.mask_low;
            best_mask_high = state.mask_high;
            best_mask_epoch = mask_epoch;
            since_improve = 0;

            LabelVector pseudo = argmax_labels(eval_cache.probs, data.num_classes());
            if (cfg.nc_label_source == NcLabelSource::TruthTrainPseudoRest) {
                for (std::int64_t i : splits.train) {
                    pseudo.label[static_cast<std::size_t>(i)] = data.labels.label[static_cast<std::size_t>(i)];
                }
            }
            state.nc = compute_metric(rules, nc_index, nh_index, pseudo);
            auto [mlow, mhigh] = masks_for(rules, state.nc);
            state.mask_low = std::move(mlow);
            state.mask_high = std::move(mhigh);
            mask_epoch++;
            prop = build_propagation(s, state.mask_low, state.mask_high, mask_epoch);
            rec.nc_updated = true;
        } else {
            since_improve++;
        }

        res.history.push_back(rec);
        res.epochs_run = epoch;
        if (since_improve >= cfg.patience) break;
    }

    res.best_val_accuracy = acc_max;
    res.final_nc_state = state;

    ForwardOptions final_opts;
    final_opts.expected_mask_epoch = mask_epoch;
    ForwardCache final_cache = forward(params, prop, data.x, final_opts);
    res.final_params_test_accuracy = accuracy_over(final_cache.probs, data.labels, splits.test);

    PropagationSet best_prop = build_propagation(s, best_mask_low, best_mask_high, best_mask_epoch);
    ForwardOptions best_opts;
    best_opts.expected_mask_epoch = best_mask_epoch;
    ForwardCache best_cache = forward(best_params, best_prop, data.x, best_opts);
    res.test_accuracy = accuracy_over(best_cache.probs, data.labels, splits.test);
    res.low_group_test_accuracy = group_accuracy(best_cache.probs, data.labels, splits.test, truth_low);
    res.high_group_test_accuracy = group_accuracy(best_cache.probs, data.labels, splits.test, truth_high);
    res.alpha_low = best_params.alpha_low();
    res.alpha_high = best_params.alpha_high();
    return res;
}

MultiRunResult run_seeds(const TrainConfig& cfg, const Dataset& data, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("run_seeds: empty seed list");
    MultiRunResult out;
    out.runs.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        TrainConfig per_seed = cfg;
        per_seed.seed = seed;
        out.runs.push_back(train(per_seed, data));
    }

    const auto count = static_cast<double>(out.runs.size());
    out.aggregate.runs = static_cast<std::int64_t>(out.runs.size());
    for (const RunResult& r : out.runs) {
        out.aggregate.mean_test += r.test_accuracy;
        out.aggregate.mean_val += r.best_val_accuracy;
    }
    out.aggregate.mean_test /= count;
    out.aggregate.mean_val /= count;
    if (out.runs.size() > 1) {
        double vt = 0.0, vv = 0.0;
        for (const RunResult& r : out.runs) {
            vt += (r.test_accuracy - out.aggregate.mean_test) * (r.test_accuracy - out.aggregate.mean_test);
            vv += (r.best_val_accuracy - out.aggregate.mean_val) * (r.best_val_accuracy - out.aggregate.mean_val);
        }
        out.aggregate.std_test = std::sqrt(vt / (count - 1.0));
        out.aggregate.std_val = std::sqrt(vv / (count - 1.0));
    }
    return out;
}

GridSearchResult grid_search(const TrainConfig& base, const Dataset& data, const Grids& grids,
                             const std::vector<std::uint64_t>& seeds) {
    GridSearchResult res;
    res.best = base;
    std::int64_t index = 0;
    for (double lr : grids.lr) {
        for (double wd : grids.weight_decay) {
            for (double dl : grids.dropout_low) {
                for (double dh : grids.dropout_high) {
                    for (int k : grids.k) {
                        for (double t : grids.threshold) {
                            for (bool loop : grids.add_self_loop) {
                                TrainConfig cfg = base;
                                cfg.lr = lr;
                                cfg.weight_decay = wd;
                                cfg.dropout_low = dl;
                                cfg.dropout_high = dh;
                                cfg.k = k;
                                cfg.threshold = t;
                                cfg.add_self_loop = loop;
                                try {
                                    MultiRunResult mr = run_seeds(cfg, data, seeds);
                                    res.evaluated++;
                                    if (mr.aggregate.mean_val > res.best_mean_val) {
                                        res.best_mean_val = mr.aggregate.mean_val;
                                        res.best = cfg;
                                        res.best_index = index;
                                    }
                                } catch (const std::exception& e) {
                                    res.failures.emplace_back(index, e.what());
                                }
                                index++;
                            }
                        }
                    }
                }
            }
        }
    }
    return res;
}

}  // namespace ncgcn
