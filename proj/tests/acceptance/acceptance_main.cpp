// Acceptance gate: exercises the contract the toolkit has to honor, one
// criterion per block, one [PASS]/[FAIL]/[SKIP] line each. Exit code is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncgcn/bundle.hpp"
#include "ncgcn/error.hpp"
#include "ncgcn/grad_check.hpp"
#include "ncgcn/khop.hpp"
#include "ncgcn/metrics.hpp"
#include "ncgcn/model.hpp"
#include "ncgcn/report.hpp"
#include "ncgcn/rng.hpp"
#include "ncgcn/sbm.hpp"
#include "ncgcn/train.hpp"

using namespace ncgcn;

namespace {

// Criterion 5 margin, pre-registered: mean test accuracy advantage (in
// accuracy points) of the full model over the single-channel ablation on
// the mixed-confusion dataset below, measured once over pilot seeds 1..10
// and frozen here. Fresh seeds 11..20 must land within +-2 points.
constexpr double kPilotMarginPoints = 3.30;  // seeds 1..10: 90.85% vs 87.55%
constexpr std::uint64_t kMixedDatasetSeed = 0;
constexpr std::int64_t kMixedN = 1000;

int g_failures = 0;

void report(int criterion, bool passed, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", passed ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!passed) g_failures++;
}

void report_skip(int criterion, const std::string& detail) {
    std::printf("[SKIP] criterion %d: %s\n", criterion, detail.c_str());
    std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CsrMatrix star_graph(std::int64_t leaves) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(static_cast<std::size_t>(leaves));
    for (std::int64_t i = 1; i <= leaves; ++i) edges.emplace_back(0, static_cast<NodeId>(i));
    return build_csr(edges, leaves + 1, true);
}

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_entropy_bound() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240901);
    const int trials = 10000;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const auto c = static_cast<std::int32_t>(2 + rng.bounded(9));          // 2..10 classes
        const auto leaves = static_cast<std::int64_t>(rng.bounded(50));        // ego-set size 1..50
        const CsrMatrix a = star_graph(leaves);
        LabelVector labels;
        labels.num_classes = c;
        labels.label.resize(static_cast<std::size_t>(leaves + 1));
        for (auto& v : labels.label) v = static_cast<std::int32_t>(rng.bounded(static_cast<std::uint64_t>(c)));
        const KHopIndex idx = khop_index(a, 1);
        const double nc = neighborhood_confusion(idx, labels).value[0];
        const double ent = entropy_oracle(idx, labels).value[0];
        if (nc > ent + 1e-12) violations++;
    }
    const double secs = seconds_since(t0);
    report(1, violations == 0 && secs < 5.0,
           format("confusion bounded by entropy on %d random neighborhoods, %d violations (%.2fs)", trials,
                  violations, secs));
}

// ---------------------------------------------------------------- criterion 2

void criterion_bipartite_case() {
    const CsrMatrix a = star_graph(3);
    LabelVector labels;
    labels.num_classes = 2;
    labels.label = {0, 1, 1, 1};
    const KHopIndex idx = khop_index(a, 1);
    const double nc = neighborhood_confusion(idx, labels).value[0];
    const double nh = node_homophily(idx, labels).value[0];
    report(2, std::fabs(nc - 0.4150) <= 0.0001 && nh == 0.0,
           format("all-opposite star center: confusion %.6f (target 0.4150 +- 0.0001), homophily %g", nc, nh));
}

// ---------------------------------------------------------------- criterion 3

void criterion_gradient_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<ModelGradCase> cases = model_grad_suite(7);
    bool all_passed = !cases.empty();
    double worst = 0.0;
    for (const ModelGradCase& c : cases) {
        all_passed = all_passed && c.passed;
        worst = std::max(worst, c.max_rel_error);
    }
    const double secs = seconds_since(t0);
    report(3, all_passed && secs < 30.0,
           format("finite differences on %zu variant cases, worst relative error %.2e (%.2fs)", cases.size(),
                  worst, secs));
}

// ---------------------------------------------------------------- criterion 4

void criterion_degenerate_mask() {
    Rng rng(4242);
    double worst = 0.0;
    const int graphs = 50;
    for (int t = 0; t < graphs; ++t) {
        const std::int64_t n = 4 + static_cast<std::int64_t>(rng.bounded(27));  // up to 30 nodes
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j)
                if (rng.bernoulli(0.2)) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        const CsrMatrix s = symmetric_normalize(build_csr(edges, n, true), true);

        // every node low (any threshold at or above the largest confusion
        // value produces exactly this mask), mixing saturated to the deep
        // channel, second-layer weights pinned to the identity
        const PropagationSet prop = build_propagation(s, NodeMask(static_cast<std::size_t>(n), true),
                                                      NodeMask(static_cast<std::size_t>(n), false));
        Rng init(9000 + static_cast<std::uint64_t>(t), RngStream::WeightInit);
        ModelParams params(5, 6, 3, Variant::Full, 0.0, 0.0, 0.0, init);
        params.low.w2.value = DenseMatrix::identity(6);
        params.low.mix_logit.value.at(0, 0) = 40.0;

        DenseMatrix x(n, 5);
        for (double& v : x.data) v = rng.uniform(-1.0, 1.0);

        const ForwardCache cache = forward(params, prop, x, {});
        const DenseMatrix ref = gcn_reference(s, x, params.low.w1.value, params.wo.value);
        for (std::size_t i = 0; i < cache.probs.data.size(); ++i)
            worst = std::max(worst, std::fabs(cache.probs.data[i] - ref.data[i]));
    }
    report(4, worst <= 1e-6,
           format("all-low masks reproduce the plain propagation model on %d graphs, worst gap %.2e", graphs,
                  worst));
}

// ------------------------------------------------------- criteria 5 and 7

struct SeparationOutcome {
    bool ran = false;
    std::string failure;
    double mean_full = 0.0;
    double mean_single = 0.0;
    std::int64_t epochs_checked = 0;
    double secs = 0.0;
};

TrainConfig separation_config() {
    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.weight_decay = 5e-4;
    cfg.dropout_low = 0.3;
    cfg.dropout_high = 0.3;
    cfg.hidden = 32;
    cfg.k = 1;
    cfg.threshold = 0.5;
    cfg.add_self_loop = true;
    cfg.max_epochs = 300;
    cfg.patience = 50;
    cfg.check_invariants = true;  // mask partition + channel locality, every epoch
    return cfg;
}

SeparationOutcome run_separation() {
    SeparationOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Dataset data = gen_mixed_confusion(kMixedN, kMixedDatasetSeed);
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 11; s <= 20; ++s) seeds.push_back(s);  // fresh: pilot used 1..10

        TrainConfig cfg = separation_config();
        cfg.variant = Variant::Full;
        const MultiRunResult full = run_seeds(cfg, data, seeds);
        cfg.variant = Variant::NoSeparation;
        const MultiRunResult single = run_seeds(cfg, data, seeds);

        out.mean_full = full.aggregate.mean_test;
        out.mean_single = single.aggregate.mean_test;
        for (const MultiRunResult* mr : {&full, &single})
            for (const RunResult& r : mr->runs) out.epochs_checked += r.epochs_run;
        out.ran = true;
    } catch (const std::exception& e) {
        out.failure = e.what();
    }
    out.secs = seconds_since(t0);
    return out;
}

void criterion_separation(const SeparationOutcome& out) {
    if (!out.ran) {
        report(5, false, "separation experiment aborted: " + out.failure);
        return;
    }
    const double margin = 100.0 * (out.mean_full - out.mean_single);
    const bool ordered = out.mean_full > out.mean_single;
    const bool replicated = std::fabs(margin - kPilotMarginPoints) <= 2.0;
    report(5, ordered && replicated && out.secs < 600.0,
           format("two-channel %.2f%% vs single-channel %.2f%% on fresh seeds 11..20, margin %.2f points "
                  "(pilot %.2f +- 2) (%.0fs)",
                  100.0 * out.mean_full, 100.0 * out.mean_single, margin, kPilotMarginPoints, out.secs));
}

void criterion_invariants(const SeparationOutcome& out) {
    // check_invariants makes every epoch's forward assert the mask partition
    // and channel locality; any violation raises and aborts criterion 5.
    report(7, out.ran && out.epochs_checked > 0,
           out.ran ? format("mask partition and channel locality asserted on every one of %lld epochs, "
                            "0 violations",
                            static_cast<long long>(out.epochs_checked))
                   : "invariant sweep aborted: " + out.failure);
}

// ---------------------------------------------------------------- criterion 6

void criterion_training_trace() {
    SbmSpec spec;
    spec.n = 150;
    spec.num_classes = 2;
    spec.p_in = 0.15;
    spec.p_out = 0.02;
    spec.feature_dim = 6;
    spec.feature_noise = 0.6;
    spec.seed = 77;
    const Dataset data = gen_sbm(spec);

    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.hidden = 16;
    cfg.dropout_low = 0.4;
    cfg.dropout_high = 0.4;
    cfg.max_epochs = 200;
    cfg.patience = 12;
    cfg.seed = 3;

    std::string trouble;
    const RunResult run = train(cfg, data);

    // (a) the first epoch always trains with an empty high channel
    if (run.history.empty() || run.history[0].high_count != 0) trouble += " first-epoch-channel";

    // (b) the confusion state moves exactly at strict validation improvements
    double best = 0.0;
    for (const EpochRecord& rec : run.history) {
        const bool improved = rec.val_accuracy > best;
        if (rec.nc_updated != improved) {
            trouble += " update-cadence";
            break;
        }
        if (improved) best = rec.val_accuracy;
    }

    // (c) early stop fires after exactly `patience` flat epochs
    if (run.epochs_run < cfg.max_epochs && run.epochs_run != run.best_epoch + cfg.patience)
        trouble += " stop-timing";
    TrainConfig frozen = cfg;
    frozen.lr = 0.0;
    frozen.patience = 1;
    if (train(frozen, data).epochs_run != 2) trouble += " frozen-stop-timing";

    // (d) reported test accuracy comes from the best-validation snapshot: a
    // run truncated exactly at the best epoch must reproduce it bitwise
    if (run.best_epoch < 1 || run.epochs_run <= run.best_epoch) {
        trouble += " trace-inconclusive";
    } else {
        TrainConfig truncated = cfg;
        truncated.max_epochs = run.best_epoch;
        const RunResult cut = train(truncated, data);
        if (cut.test_accuracy != run.test_accuracy) trouble += " snapshot-source";
        if (cut.best_epoch != run.best_epoch) trouble += " snapshot-epoch";
    }

    report(6, trouble.empty(),
           trouble.empty()
               ? format("bookkeeping trace over %lld epochs: empty first-epoch channel, updates at "
                        "improvements, stop at best+%lld, snapshot-sourced test accuracy",
                        static_cast<long long>(run.epochs_run), static_cast<long long>(cfg.patience))
               : "trace violations:" + trouble);
}

// ---------------------------------------------------------------- criterion 8

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ncgcn_acceptance_det";
    fs::create_directories(dir);

    SbmSpec spec;
    spec.n = 120;
    spec.num_classes = 3;
    spec.p_in = 0.2;
    spec.p_out = 0.03;
    spec.feature_dim = 6;
    spec.feature_noise = 0.5;
    spec.seed = 5;
    const Dataset data = gen_sbm(spec);

    TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.hidden = 12;
    cfg.max_epochs = 25;
    cfg.patience = 25;
    cfg.dropout_low = 0.5;
    cfg.dropout_high = 0.5;

    bool same = true;
    std::string first;
    for (int round = 0; round < 2; ++round) {
        TrainReport rep;
        rep.command = "train";
        rep.dataset = data.name;
        rep.config = {{"lr", "0.05"}, {"seeds", "1..3"}};
        VariantBlock block;
        block.variant = to_string(cfg.variant);
        const MultiRunResult mr = run_seeds(cfg, data, {1, 2, 3});
        block.aggregate = mr.aggregate;
        for (const RunResult& r : mr.runs) block.runs.push_back(make_view(r));
        rep.blocks.push_back(block);

        const std::string path = (dir / ("train_" + std::to_string(round) + ".json")).string();
        save_report(rep, path);
        if (round == 0) {
            first = slurp(path);
        } else {
            same = same && slurp(path) == first && !first.empty();
        }
    }

    // same exercise for a metrics-style report
    MetricsReport mrep;
    mrep.dataset = data.name;
    mrep.n = data.n();
    mrep.f = data.feature_dim();
    mrep.num_classes = data.num_classes();
    const MetricVector nc = neighborhood_confusion(khop_index(data.a, 1), data.labels);
    mrep.nc_deciles.assign(10, 0);
    mrep.nh_deciles.assign(10, 0);
    mrep.entropy_deciles.assign(10, 0);
    for (const double v : nc.value) mrep.nc_deciles[static_cast<std::size_t>(std::min(9, static_cast<int>(v * 10)))]++;
    mrep.high_nc_proportion = high_nc_proportion(nc, 0.5);
    const std::string mpath_a = (dir / "metrics_a.json").string();
    const std::string mpath_b = (dir / "metrics_b.json").string();
    save_report(mrep, mpath_a);
    save_report(mrep, mpath_b);
    same = same && slurp(mpath_a) == slurp(mpath_b);

    fs::remove_all(dir);
    report(8, same, same ? "repeated seeded runs serialize byte-identically"
                         : "repeated runs produced differing report files");
}

// ---------------------------------------------------------------- criterion 9

void criterion_real_dataset() {
    std::string dir;
    if (const char* env = std::getenv("NCGCN_PUBMED_BUNDLE"); env != nullptr && *env != '\0') {
        dir = env;
    } else if (std::filesystem::exists("data/pubmed/meta.json")) {
        dir = "data/pubmed";
    }
    if (dir.empty()) {
        report_skip(9, "no Pubmed bundle found (set NCGCN_PUBMED_BUNDLE or provide data/pubmed)");
        return;
    }

    try {
        const Dataset data = load_bundle(dir);
        if (data.n() != 19717 || data.num_classes() != 3) {
            report(9, false,
                   format("bundle shape mismatch: n=%lld C=%d (expected 19717/3)",
                          static_cast<long long>(data.n()), data.num_classes()));
            return;
        }
        const MetricVector nc = neighborhood_confusion(khop_index(data.a, 1), data.labels);
        const double prop = high_nc_proportion(nc, 0.5);
        const bool prop_ok = std::fabs(prop - 0.1371) <= 0.0001;

        TrainConfig cfg;
        cfg.lr = 0.1;
        cfg.weight_decay = 1e-4;
        cfg.dropout_low = 0.4;
        cfg.dropout_high = 0.3;
        cfg.hidden = 512;
        cfg.k = 1;
        cfg.threshold = 0.5;
        cfg.add_self_loop = true;
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 0; s < 10; ++s) seeds.push_back(s);
        const MultiRunResult mr = run_seeds(cfg, data, seeds);
        const bool acc_ok = mr.aggregate.mean_test >= 0.881;

        report(9, prop_ok && acc_ok,
               format("high-confusion share %.4f (target 0.1371 +- 0.0001), mean test %.4f (floor 0.881)",
                      prop, mr.aggregate.mean_test));
    } catch (const std::exception& e) {
        report(9, false, std::string("real-dataset check failed: ") + e.what());
    }
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_entropy_bound();
    criterion_bipartite_case();
    criterion_gradient_suite();
    criterion_degenerate_mask();
    const SeparationOutcome separation = run_separation();
    criterion_separation(separation);
    criterion_training_trace();
    criterion_invariants(separation);
    criterion_determinism();
    criterion_real_dataset();
    std::printf("%d criterion failure(s)\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
