#include "ncgcn/config_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "ncgcn/error.hpp"

namespace ncgcn {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double to_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key \"" + key + "\": expected a real number, got \"" + value + "\"");
    }
    return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key \"" + key + "\": expected an integer, got \"" + value + "\"");
    }
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key \"" + key + "\": expected a non-negative integer, got \"" + value + "\"");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key \"" + key + "\": expected true/false, got \"" + value + "\"");
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void reject_unknown(const FlatConfig& cfg, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : cfg) {
        if (allowed.find(key) == allowed.end()) throw ConfigError("unknown config key \"" + key + "\"");
    }
}

}  // namespace

FlatConfig parse_flat_config_text(const std::string& text, const std::string& origin) {
    FlatConfig out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::string_view body(line);
        const std::size_t hash = body.find('#');
        if (hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key{trim(body.substr(0, eq))};
        const std::string value{trim(body.substr(eq + 1))};
        if (key.empty()) throw ConfigError(origin + " line " + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": duplicate key \"" + key + "\"");
        }
    }
    return out;
}

FlatConfig parse_flat_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("missing or unreadable config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_flat_config_text(buf.str(), path);
}

TrainConfig train_config_from(const FlatConfig& cfg) {
    static const std::set<std::string> allowed = {
        "lr",         "weight_decay",  "dropout_low",    "dropout_high",       "dropout_raw",
        "hidden",     "k",             "threshold",      "add_self_loop",      "max_epochs",
        "patience",   "variant",       "loss_reduction", "nc_label_source",    "literal_output_mix",
        "check_invariants"};
    reject_unknown(cfg, allowed);

    TrainConfig out;
    for (const auto& [key, value] : cfg) {
        if (key == "lr") out.lr = to_real(key, value);
        else if (key == "weight_decay") out.weight_decay = to_real(key, value);
        else if (key == "dropout_low") out.dropout_low = to_real(key, value);
        else if (key == "dropout_high") out.dropout_high = to_real(key, value);
        else if (key == "dropout_raw") out.dropout_raw = to_real(key, value);
        else if (key == "hidden") out.hidden = to_int(key, value);
        else if (key == "k") out.k = static_cast<int>(to_int(key, value));
        else if (key == "threshold") out.threshold = to_real(key, value);
        else if (key == "add_self_loop") out.add_self_loop = to_bool(key, value);
        else if (key == "max_epochs") out.max_epochs = to_int(key, value);
        else if (key == "patience") out.patience = to_int(key, value);
        else if (key == "variant") out.variant = variant_from_string(value);
        else if (key == "loss_reduction") {
            if (value == "mean") out.reduction = LossReduction::Mean;
            else if (value == "sum") out.reduction = LossReduction::Sum;
            else throw ConfigError("config key \"loss_reduction\": expected mean or sum, got \"" + value + "\"");
        } else if (key == "nc_label_source") out.nc_label_source = nc_label_source_from_string(value);
        else if (key == "literal_output_mix") out.literal_output_mix = to_bool(key, value);
        else if (key == "check_invariants") out.check_invariants = to_bool(key, value);
    }
    out.validate();
    return out;
}

std::map<std::string, std::string> train_config_echo(const TrainConfig& cfg) {
    std::map<std::string, std::string> out;
    out["lr"] = format_real(cfg.lr);
    out["weight_decay"] = format_real(cfg.weight_decay);
    out["dropout_low"] = format_real(cfg.dropout_low);
    out["dropout_high"] = format_real(cfg.dropout_high);
    out["dropout_raw"] = format_real(cfg.dropout_raw);
    out["hidden"] = std::to_string(cfg.hidden);
    out["k"] = std::to_string(cfg.k);
    out["threshold"] = format_real(cfg.threshold);
    out["add_self_loop"] = cfg.add_self_loop ? "true" : "false";
    out["max_epochs"] = std::to_string(cfg.max_epochs);
    out["patience"] = std::to_string(cfg.patience);
    out["variant"] = to_string(cfg.variant);
    out["loss_reduction"] = cfg.reduction == LossReduction::Mean ? "mean" : "sum";
    out["nc_label_source"] = to_string(cfg.nc_label_source);
    out["literal_output_mix"] = cfg.literal_output_mix ? "true" : "false";
    out["check_invariants"] = cfg.check_invariants ? "true" : "false";
    return out;
}

SynthSpec synth_spec_from(const FlatConfig& cfg) {
    std::string kind = "sbm";
    if (const auto it = cfg.find("kind"); it != cfg.end()) kind = it->second;

    SynthSpec out;
    if (kind == "mixed_confusion") {
        reject_unknown(cfg, {"kind", "n", "seed", "name"});
        out.mixed = true;
        for (const auto& [key, value] : cfg) {
            if (key == "n") out.mixed_n = to_int(key, value);
            else if (key == "seed") out.mixed_seed = to_uint(key, value);
            else if (key == "name") out.name = value;
        }
        return out;
    }
    if (kind != "sbm") throw ConfigError("config key \"kind\": expected sbm or mixed_confusion, got \"" + kind + "\"");

    reject_unknown(cfg, {"kind", "n", "classes", "p_in", "p_out", "feature_dim", "feature_noise", "seed", "name"});
    for (const auto& [key, value] : cfg) {
        if (key == "n") out.sbm.n = to_int(key, value);
        else if (key == "classes") out.sbm.num_classes = static_cast<std::int32_t>(to_int(key, value));
        else if (key == "p_in") out.sbm.p_in = to_real(key, value);
        else if (key == "p_out") out.sbm.p_out = to_real(key, value);
        else if (key == "feature_dim") out.sbm.feature_dim = to_int(key, value);
        else if (key == "feature_noise") out.sbm.feature_noise = to_real(key, value);
        else if (key == "seed") out.sbm.seed = to_uint(key, value);
        else if (key == "name") out.sbm.name = value;
    }
    out.sbm.validate();
    return out;
}

}  // namespace ncgcn
