#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncgcn/report.hpp"
#include "ncgcn/sbm.hpp"
#include "ncgcn/bundle.hpp"

using namespace ncgcn;

namespace {

namespace fs = std::filesystem;

std::string cli_binary() {
    const char* env = std::getenv("NCGCN_BIN");
    REQUIRE_MESSAGE(env != nullptr, "NCGCN_BIN must point at the command-line binary");
    return env;
}

struct RunOutput {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

RunOutput run_cli(const std::vector<std::string>& args) {
    std::ostringstream cmd;
    cmd << '"' << cli_binary() << '"';
    for (const std::string& a : args) cmd << " \"" << a << '"';
    cmd << " 2>&1";
    FILE* pipe = popen(cmd.str().c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunOutput out;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.output.append(buf.data(), got);
    const int status = pclose(pipe);
    out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ncgcn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string small_bundle(const TempDir& dir) {
    SbmSpec spec;
    spec.n = 48;
    spec.num_classes = 2;
    spec.p_in = 0.3;
    spec.p_out = 0.03;
    spec.feature_dim = 4;
    spec.feature_noise = 0.3;
    spec.seed = 17;
    spec.name = "cli_toy";
    const std::string out = dir / "bundle";
    save_bundle(gen_sbm(spec), out);
    return out;
}

}  // namespace

TEST_CASE("the gradient audit subcommand exits cleanly") {
    const RunOutput r = run_cli({"grad-check", "--seed", "7"});
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("FAIL") == std::string::npos);
    CHECK(r.output.find("full") != std::string::npos);
}

TEST_CASE("usage errors exit with code two") {
    TempDir dir;
    const std::string bundle = small_bundle(dir);

    SUBCASE("threshold outside the open unit interval") {
        const RunOutput r = run_cli({"metrics", bundle, "--T", "1.5"});
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("(0,1)") != std::string::npos);
    }

    SUBCASE("unknown subcommand") { CHECK(run_cli({"frobnicate"}).exit_code == 2); }

    SUBCASE("unknown flag") { CHECK(run_cli({"grad-check", "--bogus", "1"}).exit_code == 2); }

    SUBCASE("missing bundle directory") {
        CHECK(run_cli({"metrics", dir / "no_such_bundle"}).exit_code == 2);
    }

    SUBCASE("unknown config key") {
        write_file(dir / "bad.cfg", "lr = 0.1\nlearning_rate = 0.1\n");
        const RunOutput r = run_cli({"train", bundle, "--config", dir / "bad.cfg"});
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("learning_rate") != std::string::npos);
    }

    SUBCASE("train threshold out of range via config") {
        write_file(dir / "bad_t.cfg", "threshold = 1.5\n");
        const RunOutput r = run_cli({"train", bundle, "--config", dir / "bad_t.cfg"});
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("(0,1)") != std::string::npos);
    }

    SUBCASE("malformed seed range") {
        write_file(dir / "ok.cfg", "max_epochs = 2\npatience = 2\nhidden = 4\n");
        CHECK(run_cli({"train", bundle, "--config", dir / "ok.cfg", "--seeds", "5..x"}).exit_code == 2);
        CHECK(run_cli({"train", bundle, "--config", dir / "ok.cfg", "--seeds", "9..3"}).exit_code == 2);
    }
}

TEST_CASE("help exits with code zero") {
    CHECK(run_cli({"--help"}).exit_code == 0);
    CHECK(run_cli({"train", "--help"}).exit_code == 0);
}

TEST_CASE("metrics writes a report and a decile table") {
    TempDir dir;
    const std::string bundle = small_bundle(dir);
    const RunOutput r = run_cli({"metrics", bundle, "--k", "1", "--T", "0.5", "--out", dir / "m"});
    CHECK(r.exit_code == 0);
    const LoadedReport rep = load_report(dir / "m/metrics.json");
    REQUIRE(rep.kind == ReportKind::Metrics);
    CHECK(rep.metrics.n == 48);
    CHECK(rep.metrics.dataset == "cli_toy");
    std::int64_t total = 0;
    for (const auto c : rep.metrics.nc_deciles) total += c;
    CHECK(total == 48);
    CHECK(fs::exists(dir / "m/metrics_deciles.csv"));

    const RunOutput tab = run_cli({"report", dir / "m/metrics.json", "--table", "deciles"});
    CHECK(tab.exit_code == 0);
    CHECK(tab.output.find("bin_low,bin_high") == 0);
}

TEST_CASE("train produces a self-describing report") {
    TempDir dir;
    const std::string bundle = small_bundle(dir);
    write_file(dir / "train.cfg", "lr = 0.05\nhidden = 8\nmax_epochs = 15\npatience = 15\n");
    const RunOutput r =
        run_cli({"train", bundle, "--config", dir / "train.cfg", "--seeds", "0..1", "--out", dir / "rep.json"});
    CHECK(r.exit_code == 0);

    const LoadedReport rep = load_report(dir / "rep.json");
    REQUIRE(rep.kind == ReportKind::Train);
    CHECK(rep.train.command == "train");
    REQUIRE(rep.train.blocks.size() == 1);
    CHECK(rep.train.blocks[0].runs.size() == 2);
    CHECK(rep.train.config.at("lr") == "0.050000000000000003");
    CHECK(rep.train.config.at("max_epochs") == "15");
    CHECK(rep.train.config.at("seeds") == "0..1");
    CHECK(rep.train.config.at("hidden") == "8");  // full effective config embedded
    CHECK(rep.train.config.count("weight_decay") == 1);
}

TEST_CASE("ablate runs all four variants on shared splits") {
    TempDir dir;
    const std::string bundle = small_bundle(dir);
    write_file(dir / "ab.cfg", "lr = 0.05\nhidden = 8\nmax_epochs = 6\npatience = 6\n");
    const RunOutput r =
        run_cli({"ablate", bundle, "--config", dir / "ab.cfg", "--seeds", "3..4", "--out", dir / "ab.json"});
    CHECK(r.exit_code == 0);

    const LoadedReport rep = load_report(dir / "ab.json");
    REQUIRE(rep.kind == ReportKind::Train);
    CHECK(rep.train.command == "ablate");
    REQUIRE(rep.train.blocks.size() == 4);
    CHECK(rep.train.blocks[0].variant == "full");
    CHECK(rep.train.blocks[1].variant == "no_separation");
    CHECK(rep.train.blocks[2].variant == "no_message_separation");
    CHECK(rep.train.blocks[3].variant == "nh_separation");
    for (const VariantBlock& b : rep.train.blocks) {
        REQUIRE(b.runs.size() == 2);
        CHECK(b.runs[0].split_digest == rep.train.blocks[0].runs[0].split_digest);
        CHECK(b.runs[1].split_digest == rep.train.blocks[0].runs[1].split_digest);
    }

    const RunOutput groups = run_cli({"report", dir / "ab.json", "--table", "groups"});
    CHECK(groups.exit_code == 0);
    CHECK(groups.output.find("no_separation,mean,low,") != std::string::npos);
    const RunOutput recall = run_cli({"report", dir / "ab.json", "--table", "recall"});
    CHECK(recall.exit_code == 0);
    CHECK(run_cli({"report", dir / "ab.json", "--table", "bogus"}).exit_code == 2);
    CHECK(run_cli({"report", dir / "ab.json", "--table", "deciles"}).exit_code == 2);
}

TEST_CASE("gen-synth and a metrics pass compose") {
    TempDir dir;
    write_file(dir / "spec.cfg", "kind = mixed_confusion\nn = 200\nseed = 5\nname = mixed_small\n");
    const RunOutput gen = run_cli({"gen-synth", "--spec", dir / "spec.cfg", "--out", dir / "mixed"});
    CHECK(gen.exit_code == 0);
    const Dataset d = load_bundle(dir / "mixed");
    CHECK(d.name == "mixed_small");
    CHECK(d.n() == 200);

    CHECK(run_cli({"gen-synth", "--spec", dir / "spec.cfg", "--out", dir / "mixed2"}).exit_code == 0);
    // deterministic generation: the two bundles are identical on disk
    for (const char* leaf : {"edges.tsv", "features.tsv", "labels.tsv", "meta.json"}) {
        std::ifstream a(dir / ("mixed/" + std::string(leaf)), std::ios::binary);
        std::ifstream b(dir / ("mixed2/" + std::string(leaf)), std::ios::binary);
        std::ostringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }

    write_file(dir / "bad_spec.cfg", "kind = sbm\nn = 10\nclasses = 2\np_in = 0.2\np_out = 0.5\nfeature_dim = 3\n");
    CHECK(run_cli({"gen-synth", "--spec", dir / "bad_spec.cfg", "--out", dir / "bad"}).exit_code == 2);
}

TEST_CASE("repeated seeded runs write byte-identical reports") {
    TempDir dir;
    const std::string bundle = small_bundle(dir);
    write_file(dir / "train.cfg", "lr = 0.05\nhidden = 8\nmax_epochs = 10\npatience = 10\ndropout_low = 0.4\n");
    CHECK(run_cli({"train", bundle, "--config", dir / "train.cfg", "--seeds", "2", "--out", dir / "a.json"})
              .exit_code == 0);
    CHECK(run_cli({"train", bundle, "--config", dir / "train.cfg", "--seeds", "2", "--out", dir / "b.json"})
              .exit_code == 0);
    std::ifstream fa(dir / "a.json", std::ios::binary), fb(dir / "b.json", std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}
