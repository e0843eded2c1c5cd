#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncgcn/dataset.hpp"
#include "ncgcn/metrics.hpp"
#include "ncgcn/model.hpp"
#include "ncgcn/splits.hpp"

namespace ncgcn {

enum class NcLabelSource { PseudoAll, TruthTrainPseudoRest };

NcLabelSource nc_label_source_from_string(const std::string& name);
std::string to_string(NcLabelSource v);

struct TrainConfig {
    double lr = 0.01;
    double weight_decay = 5e-4;
    double dropout_low = 0.5;
    double dropout_high = 0.5;
    double dropout_raw = 0.0;
    std::int64_t hidden = 64;
    int k = 1;
    double threshold = 0.5;
    bool add_self_loop = true;
    std::int64_t max_epochs = 500;
    std::int64_t patience = 100;
    std::uint64_t seed = 0;
    Variant variant = Variant::Full;
    LossReduction reduction = LossReduction::Mean;
    NcLabelSource nc_label_source = NcLabelSource::PseudoAll;
    bool literal_output_mix = false;
    bool check_invariants = false;

    void validate() const;  // throws ConfigError with the offending field
};

struct EpochRecord {
    double loss = 0.0;
    double val_accuracy = 0.0;
    double recall_high = 0.0;  // recall of the epoch's high mask vs ground truth
    double low_group_val_accuracy = 0.0;
    double high_group_val_accuracy = 0.0;
    std::int64_t high_count = 0;  // high-mask size in effect this epoch
    bool nc_updated = false;      // confusion state recomputed at epoch end
};

struct RunResult {
    std::uint64_t seed = 0;
    std::uint64_t split_digest = 0;
    double test_accuracy = 0.0;
    double best_val_accuracy = 0.0;
    double low_group_test_accuracy = 0.0;   // NaN when the group misses the test set
    double high_group_test_accuracy = 0.0;  // NaN when the group misses the test set
    double final_params_test_accuracy = 0.0;  // diagnostic: last-epoch params, not the snapshot
    double alpha_low = 0.5;
    double alpha_high = 0.5;
    NcState final_nc_state;  // confusion state when the loop ended
    std::vector<EpochRecord> history;
    std::int64_t epochs_run = 0;
    std::int64_t best_epoch = 0;  // 0 when validation never improved
};

/// Full training loop: confusion state starts all-low, masks and propagation
/// are rebuilt whenever the state moves, one Adam step per epoch, strict
/// validation improvement drives snapshots + state updates, early stop after
/// `patience` non-improving epochs. Test numbers come from the snapshot.
RunResult train(const TrainConfig& cfg, const Dataset& data);

/// Argmax accuracy over idx, eval mode. Empty idx is an error.
double evaluate(const ModelParams& params, const PropagationSet& prop, const DenseMatrix& x,
                const LabelVector& labels, const std::vector<std::int64_t>& idx);

struct Aggregate {
    double mean_test = 0.0;
    double std_test = 0.0;
    double mean_val = 0.0;
    double std_val = 0.0;
    std::int64_t runs = 0;
};

struct MultiRunResult {
    std::vector<RunResult> runs;
    Aggregate aggregate;
};

/// One train() per seed (seed drives split, init and dropout); mean and
/// sample standard deviation over seeds (std 0 for a single run).
MultiRunResult run_seeds(const TrainConfig& cfg, const Dataset& data, const std::vector<std::uint64_t>& seeds);

/// Search spaces from the tuning appendix; trim before calling grid_search
/// unless you mean the full cross product.
struct Grids {
    std::vector<double> lr = {1e-3, 5e-3, 1e-2, 5e-2, 0.1};
    std::vector<double> weight_decay = {0.0, 5e-5, 1e-4, 5e-4, 1e-3};
    std::vector<double> dropout_low = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> dropout_high = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<int> k = {1, 2};
    std::vector<double> threshold = {0.3, 0.4, 0.5, 0.6, 0.7};
    std::vector<bool> add_self_loop = {true, false};
};

struct GridSearchResult {
    TrainConfig best;
    double best_mean_val = -1.0;
    std::int64_t best_index = -1;
    std::int64_t evaluated = 0;
    std::vector<std::pair<std::int64_t, std::string>> failures;  // grid index, reason
};

/// Exhaustive enumeration in declaration order (lr outermost, self-loop
/// innermost); best mean validation accuracy wins, first point on ties.
/// Points that throw are recorded as failures and skipped.
GridSearchResult grid_search(const TrainConfig& base, const Dataset& data, const Grids& grids,
                             const std::vector<std::uint64_t>& seeds);

}  // namespace ncgcn
