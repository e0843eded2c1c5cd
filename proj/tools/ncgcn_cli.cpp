#include <charconv>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncgcn/bundle.hpp"
#include "ncgcn/config_file.hpp"
#include "ncgcn/error.hpp"
#include "ncgcn/grad_check.hpp"
#include "ncgcn/khop.hpp"
#include "ncgcn/metrics.hpp"
#include "ncgcn/report.hpp"
#include "ncgcn/sbm.hpp"
#include "ncgcn/train.hpp"

namespace {

using namespace ncgcn;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    auto parse_one = [&](std::string_view tok) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ConfigError("--seeds: expected an integer or a..b range, got \"" + text + "\"");
        }
        return v;
    };
    const std::size_t dots = text.find("..");
    if (dots == std::string::npos) return {parse_one(text)};
    const std::uint64_t a = parse_one(std::string_view(text).substr(0, dots));
    const std::uint64_t b = parse_one(std::string_view(text).substr(dots + 2));
    if (b < a) throw ConfigError("--seeds: range end before start in \"" + text + "\"");
    if (b - a >= 10000) throw ConfigError("--seeds: range too large (max 10000 seeds)");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    return out;
}

std::vector<std::int64_t> deciles_of(const MetricVector& m) {
    std::vector<std::int64_t> bins(10, 0);
    for (double v : m.value) {
        int b = static_cast<int>(v * 10.0);
        if (b < 0) b = 0;
        if (b > 9) b = 9;
        bins[static_cast<std::size_t>(b)]++;
    }
    return bins;
}

int cmd_metrics(const std::string& bundle, int k, double threshold, const std::string& out_dir) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("--T must lie in the open interval (0,1), got " + std::to_string(threshold));
    }
    Dataset data = load_bundle(bundle);
    const KHopIndex index = khop_index(data.a, k);
    const KHopIndex index1 = k == 1 ? index : khop_index(data.a, 1);

    MetricsReport rep;
    rep.dataset = data.name;
    rep.n = data.n();
    rep.f = data.feature_dim();
    rep.num_classes = data.num_classes();
    rep.k = k;
    rep.threshold = threshold;

    const MetricVector nc = neighborhood_confusion(index, data.labels);
    const MetricVector nh = node_homophily(index1, data.labels);
    const MetricVector entropy = entropy_oracle(index, data.labels);
    rep.nc_deciles = deciles_of(nc);
    rep.nh_deciles = deciles_of(nh);
    rep.entropy_deciles = deciles_of(entropy);
    rep.high_nc_proportion = high_nc_proportion(nc, threshold);
    rep.duplication_structure = duplication_rate(data.a, data.labels, data.x, DuplicationMode::StructureLabel);
    rep.duplication_feature = duplication_rate(data.a, data.labels, data.x, DuplicationMode::FeatureLabel);

    std::filesystem::create_directories(out_dir);
    const std::string json_path = (std::filesystem::path(out_dir) / "metrics.json").string();
    const std::string csv_path = (std::filesystem::path(out_dir) / "metrics_deciles.csv").string();
    save_report(rep, json_path);
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot write " + csv_path);
    csv << csv_deciles(rep);

    std::printf("%s: n=%lld C=%d k=%d T=%.17g\n", data.name.c_str(), static_cast<long long>(rep.n),
                rep.num_classes, k, threshold);
    std::printf("high-NC proportion: %.6f\n", rep.high_nc_proportion);
    std::printf("duplication structure/feature: %.6f / %.6f\n", rep.duplication_structure, rep.duplication_feature);
    std::printf("wrote %s and %s\n", json_path.c_str(), csv_path.c_str());
    return kExitOk;
}

VariantBlock run_block(TrainConfig cfg, Variant variant, const Dataset& data,
                       const std::vector<std::uint64_t>& seeds) {
    cfg.variant = variant;
    MultiRunResult mr = run_seeds(cfg, data, seeds);
    VariantBlock block;
    block.variant = to_string(variant);
    block.aggregate = mr.aggregate;
    for (const RunResult& r : mr.runs) block.runs.push_back(make_view(r));
    return block;
}

int cmd_train(const std::string& bundle, const std::string& config_path, const std::string& seeds_text,
              const std::string& out_path, bool ablate) {
    Dataset data = load_bundle(bundle);
    TrainConfig cfg = train_config_from(parse_flat_config(config_path));
    const std::vector<std::uint64_t> seeds = parse_seed_range(seeds_text);

    TrainReport rep;
    rep.command = ablate ? "ablate" : "train";
    rep.dataset = data.name;
    rep.config = train_config_echo(cfg);
    rep.config["seeds"] = seeds_text;

    if (ablate) {
        for (Variant v : {Variant::Full, Variant::NoSeparation, Variant::NoMessageSeparation,
                          Variant::NhSeparation}) {
            rep.blocks.push_back(run_block(cfg, v, data, seeds));
        }
    } else {
        rep.blocks.push_back(run_block(cfg, cfg.variant, data, seeds));
    }
    save_report(rep, out_path);

    for (const VariantBlock& b : rep.blocks) {
        std::printf("%-24s mean test %.2f%% +- %.2f (val %.2f%%), %lld seed(s)\n", b.variant.c_str(),
                    100.0 * b.aggregate.mean_test, 100.0 * b.aggregate.std_test, 100.0 * b.aggregate.mean_val,
                    static_cast<long long>(b.aggregate.runs));
    }
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

int cmd_gen_synth(const std::string& spec_path, const std::string& out_dir) {
    const SynthSpec spec = synth_spec_from(parse_flat_config(spec_path));
    Dataset data = spec.mixed ? gen_mixed_confusion(spec.mixed_n, spec.mixed_seed) : gen_sbm(spec.sbm);
    if (spec.mixed && !spec.name.empty()) data.name = spec.name;
    save_bundle(data, out_dir);
    std::printf("wrote %s: n=%lld, undirected edges=%lld, f=%lld, C=%d\n", out_dir.c_str(),
                static_cast<long long>(data.n()), static_cast<long long>(data.a.nnz() / 2),
                static_cast<long long>(data.feature_dim()), data.num_classes());
    return kExitOk;
}

int cmd_grad_check(std::uint64_t seed) {
    const std::vector<ModelGradCase> cases = model_grad_suite(seed);
    bool all_passed = true;
    for (const ModelGradCase& c : cases) {
        std::printf("%-32s max rel err %.3e  %s\n", c.name.c_str(), c.max_rel_error,
                    c.passed ? "ok" : "FAIL");
        all_passed = all_passed && c.passed;
    }
    return all_passed ? kExitOk : kExitRuntime;
}

int cmd_report(const std::string& report_path, const std::string& table) {
    const LoadedReport loaded = load_report(report_path);
    if (table == "deciles") {
        if (loaded.kind != ReportKind::Metrics) {
            throw ConfigError("--table deciles needs a metrics report, got \"" + loaded.train.command + "\"");
        }
        std::fputs(csv_deciles(loaded.metrics).c_str(), stdout);
        return kExitOk;
    }
    if (loaded.kind != ReportKind::Train) {
        throw ConfigError("--table " + table + " needs a train or ablate report");
    }
    if (table == "groups") {
        std::fputs(csv_groups(loaded.train).c_str(), stdout);
        return kExitOk;
    }
    if (table == "recall") {
        std::fputs(csv_recall(loaded.train).c_str(), stdout);
        return kExitOk;
    }
    throw ConfigError("unknown table \"" + table + "\" (expected deciles, groups or recall)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighborhood-confusion GCN toolkit"};
    app.require_subcommand(1);

    std::string bundle, config_path, out_path, out_dir, spec_path, report_path, table;
    std::string seeds_text = "0";
    int k = 1;
    double threshold = 0.5;
    std::uint64_t seed = 7;

    CLI::App* metrics = app.add_subcommand("metrics", "Confusion/homophily statistics for a graph bundle");
    metrics->add_option("bundle", bundle, "graph bundle directory")->required();
    metrics->add_option("--k", k, "neighborhood radius (1 or 2)")->default_val(1);
    metrics->add_option("--T", threshold, "confusion threshold in (0,1)")->default_val(0.5);
    metrics->add_option("--out", out_dir, "output directory")->default_val(".");

    CLI::App* train = app.add_subcommand("train", "Train on a bundle over one or more seeds");
    train->add_option("bundle", bundle, "graph bundle directory")->required();
    train->add_option("--config", config_path, "flat key = value config file")->required();
    train->add_option("--seeds", seeds_text, "seed or inclusive range a..b")->default_val("0");
    train->add_option("--out", out_path, "report path")->default_val("train_report.json");

    CLI::App* ablate = app.add_subcommand("ablate", "Run all four variants on shared seeds");
    ablate->add_option("bundle", bundle, "graph bundle directory")->required();
    ablate->add_option("--config", config_path, "flat key = value config file")->required();
    ablate->add_option("--seeds", seeds_text, "seed or inclusive range a..b")->default_val("0");
    ablate->add_option("--out", out_path, "report path")->default_val("ablate_report.json");

    CLI::App* gen = app.add_subcommand("gen-synth", "Generate a synthetic bundle");
    gen->add_option("--spec", spec_path, "generator spec file")->required();
    gen->add_option("--out", out_dir, "bundle directory to create")->required();

    CLI::App* gradcheck = app.add_subcommand("grad-check", "Finite-difference audit of all model variants");
    gradcheck->add_option("--seed", seed, "suite seed")->default_val(7);

    CLI::App* report = app.add_subcommand("report", "Render CSV tables from a saved report");
    report->add_option("report", report_path, "report JSON path")->required();
    report->add_option("--table", table, "deciles, groups or recall")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (metrics->parsed()) return cmd_metrics(bundle, k, threshold, out_dir);
        if (train->parsed()) return cmd_train(bundle, config_path, seeds_text, out_path, false);
        if (ablate->parsed()) return cmd_train(bundle, config_path, seeds_text, out_path, true);
        if (gen->parsed()) return cmd_gen_synth(spec_path, out_dir);
        if (gradcheck->parsed()) return cmd_grad_check(seed);
        if (report->parsed()) return cmd_report(report_path, table);
        std::fprintf(stderr, "error: no subcommand\n");
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitUsage;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
