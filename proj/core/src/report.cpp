#include "ncgcn/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ncgcn/error.hpp"

namespace ncgcn {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json real(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double real_back(const json& j, const std::string& field) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw DataError("report field \"" + field + "\" must be a number or null");
    return j.get<double>();
}

const json& expect(const json& obj, const std::string& field) {
    const auto it = obj.find(field);
    if (it == obj.end()) throw DataError("report is missing field \"" + field + "\"");
    return *it;
}

template <typename T>
T expect_as(const json& obj, const std::string& field) {
    const json& j = expect(obj, field);
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw DataError("report field \"" + field + "\" has the wrong type");
    }
}

json history_to_json(const std::vector<EpochRecord>& history) {
    json h;
    h["loss"] = json::array();
    h["val_accuracy"] = json::array();
    h["recall_high"] = json::array();
    h["low_group_val_accuracy"] = json::array();
    h["high_group_val_accuracy"] = json::array();
    h["high_count"] = json::array();
    h["nc_updated"] = json::array();
    for (const EpochRecord& e : history) {
        h["loss"].push_back(real(e.loss));
        h["val_accuracy"].push_back(real(e.val_accuracy));
        h["recall_high"].push_back(real(e.recall_high));
        h["low_group_val_accuracy"].push_back(real(e.low_group_val_accuracy));
        h["high_group_val_accuracy"].push_back(real(e.high_group_val_accuracy));
        h["high_count"].push_back(e.high_count);
        h["nc_updated"].push_back(e.nc_updated);
    }
    return h;
}

std::vector<EpochRecord> history_from_json(const json& h) {
    const auto& loss = expect(h, "loss");
    const std::size_t len = loss.size();
    for (const char* key : {"val_accuracy", "recall_high", "low_group_val_accuracy", "high_group_val_accuracy",
                            "high_count", "nc_updated"}) {
        if (expect(h, key).size() != len) throw DataError("report field \"history." + std::string(key) +
                                                          "\" length mismatch");
    }
    std::vector<EpochRecord> out(len);
    for (std::size_t i = 0; i < len; ++i) {
        out[i].loss = real_back(h["loss"][i], "history.loss");
        out[i].val_accuracy = real_back(h["val_accuracy"][i], "history.val_accuracy");
        out[i].recall_high = real_back(h["recall_high"][i], "history.recall_high");
        out[i].low_group_val_accuracy = real_back(h["low_group_val_accuracy"][i], "history.low_group_val_accuracy");
        out[i].high_group_val_accuracy = real_back(h["high_group_val_accuracy"][i], "history.high_group_val_accuracy");
        out[i].high_count = h["high_count"][i].get<std::int64_t>();
        out[i].nc_updated = h["nc_updated"][i].get<bool>();
    }
    return out;
}

json run_to_json(const SeedRunView& r) {
    json j;
    j["seed"] = r.seed;
    j["split_digest"] = r.split_digest;
    j["test_accuracy"] = real(r.test_accuracy);
    j["best_val_accuracy"] = real(r.best_val_accuracy);
    j["low_group_test_accuracy"] = real(r.low_group_test_accuracy);
    j["high_group_test_accuracy"] = real(r.high_group_test_accuracy);
    j["final_params_test_accuracy"] = real(r.final_params_test_accuracy);
    j["alpha_low"] = real(r.alpha_low);
    j["alpha_high"] = real(r.alpha_high);
    j["final_high_proportion"] = real(r.final_high_proportion);
    j["epochs_run"] = r.epochs_run;
    j["best_epoch"] = r.best_epoch;
    j["history"] = history_to_json(r.history);
    return j;
}

SeedRunView run_from_json(const json& j) {
    SeedRunView r;
    r.seed = expect_as<std::uint64_t>(j, "seed");
    r.split_digest = expect_as<std::string>(j, "split_digest");
    r.test_accuracy = real_back(expect(j, "test_accuracy"), "test_accuracy");
    r.best_val_accuracy = real_back(expect(j, "best_val_accuracy"), "best_val_accuracy");
    r.low_group_test_accuracy = real_back(expect(j, "low_group_test_accuracy"), "low_group_test_accuracy");
    r.high_group_test_accuracy = real_back(expect(j, "high_group_test_accuracy"), "high_group_test_accuracy");
    r.final_params_test_accuracy = real_back(expect(j, "final_params_test_accuracy"), "final_params_test_accuracy");
    r.alpha_low = real_back(expect(j, "alpha_low"), "alpha_low");
    r.alpha_high = real_back(expect(j, "alpha_high"), "alpha_high");
    r.final_high_proportion = real_back(expect(j, "final_high_proportion"), "final_high_proportion");
    r.epochs_run = expect_as<std::int64_t>(j, "epochs_run");
    r.best_epoch = expect_as<std::int64_t>(j, "best_epoch");
    r.history = history_from_json(expect(j, "history"));
    return r;
}

json aggregate_to_json(const Aggregate& a) {
    json j;
    j["mean_test"] = real(a.mean_test);
    j["std_test"] = real(a.std_test);
    j["mean_val"] = real(a.mean_val);
    j["std_val"] = real(a.std_val);
    j["runs"] = a.runs;
    return j;
}

Aggregate aggregate_from_json(const json& j) {
    Aggregate a;
    a.mean_test = real_back(expect(j, "mean_test"), "mean_test");
    a.std_test = real_back(expect(j, "std_test"), "std_test");
    a.mean_val = real_back(expect(j, "mean_val"), "mean_val");
    a.std_val = real_back(expect(j, "std_val"), "std_val");
    a.runs = expect_as<std::int64_t>(j, "runs");
    return a;
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report to " + path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing or unreadable report: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON (" + e.what() + ")");
    }
}

}  // namespace

SeedRunView make_view(const RunResult& r) {
    SeedRunView v;
    v.seed = r.seed;
    v.split_digest = hex64(r.split_digest);
    v.test_accuracy = r.test_accuracy;
    v.best_val_accuracy = r.best_val_accuracy;
    v.low_group_test_accuracy = r.low_group_test_accuracy;
    v.high_group_test_accuracy = r.high_group_test_accuracy;
    v.final_params_test_accuracy = r.final_params_test_accuracy;
    v.alpha_low = r.alpha_low;
    v.alpha_high = r.alpha_high;
    const std::size_t n = r.final_nc_state.mask_high.size();
    v.final_high_proportion =
        n == 0 ? 0.0 : static_cast<double>(r.final_nc_state.mask_high.count()) / static_cast<double>(n);
    v.epochs_run = r.epochs_run;
    v.best_epoch = r.best_epoch;
    v.history = r.history;
    return v;
}

void save_report(const TrainReport& report, const std::string& path) {
    json doc;
    doc["schema"] = report.schema;
    doc["command"] = report.command;
    doc["dataset"] = report.dataset;
    doc["config"] = json::object();
    for (const auto& [k, v] : report.config) doc["config"][k] = v;
    doc["blocks"] = json::array();
    for (const VariantBlock& b : report.blocks) {
        json jb;
        jb["variant"] = b.variant;
        jb["aggregate"] = aggregate_to_json(b.aggregate);
        jb["runs"] = json::array();
        for (const SeedRunView& r : b.runs) jb["runs"].push_back(run_to_json(r));
        doc["blocks"].push_back(std::move(jb));
    }
    write_json(doc, path);
}

void save_report(const MetricsReport& report, const std::string& path) {
    json doc;
    doc["schema"] = report.schema;
    doc["command"] = report.command;
    doc["dataset"] = report.dataset;
    doc["n"] = report.n;
    doc["f"] = report.f;
    doc["num_classes"] = report.num_classes;
    doc["k"] = report.k;
    doc["threshold"] = real(report.threshold);
    doc["nc_deciles"] = report.nc_deciles;
    doc["nh_deciles"] = report.nh_deciles;
    doc["entropy_deciles"] = report.entropy_deciles;
    doc["high_nc_proportion"] = real(report.high_nc_proportion);
    doc["duplication_structure"] = real(report.duplication_structure);
    doc["duplication_feature"] = real(report.duplication_feature);
    write_json(doc, path);
}

LoadedReport load_report(const std::string& path) {
    const json doc = read_json(path);
    if (!doc.is_object()) throw DataError(path + ": report must be a JSON object");
    const int schema = expect_as<int>(doc, "schema");
    if (schema != 1) throw DataError("unsupported report schema " + std::to_string(schema));
    const auto command = expect_as<std::string>(doc, "command");

    LoadedReport out;
    if (command == "metrics") {
        out.kind = ReportKind::Metrics;
        MetricsReport& m = out.metrics;
        m.schema = schema;
        m.command = command;
        m.dataset = expect_as<std::string>(doc, "dataset");
        m.n = expect_as<std::int64_t>(doc, "n");
        m.f = expect_as<std::int64_t>(doc, "f");
        m.num_classes = expect_as<std::int32_t>(doc, "num_classes");
        m.k = expect_as<int>(doc, "k");
        m.threshold = real_back(expect(doc, "threshold"), "threshold");
        m.nc_deciles = expect_as<std::vector<std::int64_t>>(doc, "nc_deciles");
        m.nh_deciles = expect_as<std::vector<std::int64_t>>(doc, "nh_deciles");
        m.entropy_deciles = expect_as<std::vector<std::int64_t>>(doc, "entropy_deciles");
        m.high_nc_proportion = real_back(expect(doc, "high_nc_proportion"), "high_nc_proportion");
        m.duplication_structure = real_back(expect(doc, "duplication_structure"), "duplication_structure");
        m.duplication_feature = real_back(expect(doc, "duplication_feature"), "duplication_feature");
        for (const auto* d : {&m.nc_deciles, &m.nh_deciles, &m.entropy_deciles}) {
            if (d->size() != 10) throw DataError("report decile arrays must have 10 entries");
        }
        return out;
    }
    if (command == "train" || command == "ablate") {
        out.kind = ReportKind::Train;
        TrainReport& t = out.train;
        t.schema = schema;
        t.command = command;
        t.dataset = expect_as<std::string>(doc, "dataset");
        const json& cfg = expect(doc, "config");
        if (!cfg.is_object()) throw DataError("report field \"config\" must be an object");
        for (const auto& [k, v] : cfg.items()) {
            if (!v.is_string()) throw DataError("report config value for \"" + k + "\" must be a string");
            t.config[k] = v.get<std::string>();
        }
        const json& blocks = expect(doc, "blocks");
        if (!blocks.is_array()) throw DataError("report field \"blocks\" must be an array");
        for (const json& jb : blocks) {
            VariantBlock b;
            b.variant = expect_as<std::string>(jb, "variant");
            b.aggregate = aggregate_from_json(expect(jb, "aggregate"));
            for (const json& jr : expect(jb, "runs")) b.runs.push_back(run_from_json(jr));
            t.blocks.push_back(std::move(b));
        }
        return out;
    }
    throw DataError("unknown report command \"" + command + "\"");
}

namespace {

std::string csv_real(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string csv_deciles(const MetricsReport& report) {
    std::ostringstream out;
    out << "bin_low,bin_high,nc_count,nh_count,entropy_count\n";
    for (std::size_t b = 0; b < 10; ++b) {
        out << csv_real(0.1 * static_cast<double>(b)) << ',' << csv_real(0.1 * static_cast<double>(b + 1)) << ','
            << report.nc_deciles[b] << ',' << report.nh_deciles[b] << ',' << report.entropy_deciles[b] << '\n';
    }
    return out.str();
}

std::string csv_groups(const TrainReport& report) {
    std::ostringstream out;
    out << "variant,seed,group,test_accuracy\n";
    for (const VariantBlock& b : report.blocks) {
        double low_sum = 0.0, high_sum = 0.0;
        std::int64_t low_n = 0, high_n = 0;
        for (const SeedRunView& r : b.runs) {
            out << b.variant << ',' << r.seed << ",low," << csv_real(r.low_group_test_accuracy) << '\n';
            out << b.variant << ',' << r.seed << ",high," << csv_real(r.high_group_test_accuracy) << '\n';
            if (!std::isnan(r.low_group_test_accuracy)) {
                low_sum += r.low_group_test_accuracy;
                low_n++;
            }
            if (!std::isnan(r.high_group_test_accuracy)) {
                high_sum += r.high_group_test_accuracy;
                high_n++;
            }
        }
        out << b.variant << ",mean,low,"
            << csv_real(low_n > 0 ? low_sum / static_cast<double>(low_n) : std::nan("")) << '\n';
        out << b.variant << ",mean,high,"
            << csv_real(high_n > 0 ? high_sum / static_cast<double>(high_n) : std::nan("")) << '\n';
    }
    return out.str();
}

std::string csv_recall(const TrainReport& report) {
    std::ostringstream out;
    out << "variant,seed,epoch,recall_high,high_count\n";
    for (const VariantBlock& b : report.blocks) {
        for (const SeedRunView& r : b.runs) {
            for (std::size_t e = 0; e < r.history.size(); ++e) {
                out << b.variant << ',' << r.seed << ',' << (e + 1) << ',' << csv_real(r.history[e].recall_high)
                    << ',' << r.history[e].high_count << '\n';
            }
        }
    }
    return out.str();
}

}  // namespace ncgcn
