#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncgcn/train.hpp"

namespace ncgcn {

/// Serializable slice of a RunResult (full per-node state stays in memory,
/// reports carry the summary plus the whole epoch history).
struct SeedRunView {
    std::uint64_t seed = 0;
    std::string split_digest;  // 16 hex chars
    double test_accuracy = 0.0;
    double best_val_accuracy = 0.0;
    double low_group_test_accuracy = 0.0;
    double high_group_test_accuracy = 0.0;
    double final_params_test_accuracy = 0.0;
    double alpha_low = 0.5;
    double alpha_high = 0.5;
    double final_high_proportion = 0.0;
    std::int64_t epochs_run = 0;
    std::int64_t best_epoch = 0;
    std::vector<EpochRecord> history;
};

SeedRunView make_view(const RunResult& r);

struct VariantBlock {
    std::string variant;
    std::vector<SeedRunView> runs;
    Aggregate aggregate;
};

struct TrainReport {
    int schema = 1;
    std::string command = "train";  // "train" or "ablate"
    std::string dataset;
    std::map<std::string, std::string> config;  // effective config after defaults
    std::vector<VariantBlock> blocks;
};

struct MetricsReport {
    int schema = 1;
    std::string command = "metrics";
    std::string dataset;
    std::int64_t n = 0;
    std::int64_t f = 0;
    std::int32_t num_classes = 0;
    int k = 1;
    double threshold = 0.5;
    std::vector<std::int64_t> nc_deciles;       // 10 counts, bin = min(floor(10v), 9)
    std::vector<std::int64_t> nh_deciles;
    std::vector<std::int64_t> entropy_deciles;
    double high_nc_proportion = 0.0;
    double duplication_structure = 0.0;
    double duplication_feature = 0.0;
};

/// JSON with sorted keys and lossless number round-trips; NaN becomes null.
/// Output is a pure function of the content (no timestamps, no environment).
void save_report(const TrainReport& report, const std::string& path);
void save_report(const MetricsReport& report, const std::string& path);

enum class ReportKind { Train, Metrics };

struct LoadedReport {
    ReportKind kind = ReportKind::Train;
    TrainReport train;
    MetricsReport metrics;
};

/// Schema-checked inverse of save_report; violations raise DataError naming
/// the offending field.
LoadedReport load_report(const std::string& path);

std::string csv_deciles(const MetricsReport& report);
std::string csv_groups(const TrainReport& report);
std::string csv_recall(const TrainReport& report);

}  // namespace ncgcn
