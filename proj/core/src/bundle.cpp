#include "ncgcn/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ncgcn/error.hpp"

namespace ncgcn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& file, std::size_t line, const std::string& what) {
    throw DataError(file + " line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing or unreadable file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::int64_t parse_int(std::string_view tok, const std::string& file, std::size_t line) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        parse_fail(file, line, "expected an integer, got \"" + std::string(tok) + "\"");
    }
    return v;
}

double parse_real(std::string_view tok, const std::string& file, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        parse_fail(file, line, "expected a real number, got \"" + std::string(tok) + "\"");
    }
    return v;
}

json load_meta(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing or unreadable file: " + path.string());
    json meta;
    try {
        meta = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    for (const char* key : {"n", "f", "C", "name"}) {
        if (!meta.contains(key)) throw DataError(path.string() + ": missing key \"" + key + "\"");
    }
    if (!meta["n"].is_number_integer() || !meta["f"].is_number_integer() || !meta["C"].is_number_integer() ||
        !meta["name"].is_string()) {
        throw DataError(path.string() + ": n, f, C must be integers and name a string");
    }
    return meta;
}

}  // namespace

Dataset load_bundle(const std::string& dir, BundleWarnings* warnings) {
    const fs::path root(dir);
    const json meta = load_meta(root / "meta.json");
    const std::int64_t n = meta["n"].get<std::int64_t>();
    const std::int64_t f = meta["f"].get<std::int64_t>();
    const auto c_count = meta["C"].get<std::int32_t>();
    if (n < 1 || f < 1 || c_count < 1) throw DataError((root / "meta.json").string() + ": n, f, C must be positive");

    Dataset d;
    d.name = meta["name"].get<std::string>();

    const std::string labels_file = (root / "labels.tsv").string();
    const std::vector<std::string> label_lines = read_lines(labels_file);
    if (static_cast<std::int64_t>(label_lines.size()) != n) {
        throw DataError(labels_file + ": " + std::to_string(label_lines.size()) + " line(s), meta says n = " +
                        std::to_string(n));
    }
    d.labels.num_classes = c_count;
    d.labels.label.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < label_lines.size(); ++i) {
        const std::int64_t y = parse_int(label_lines[i], labels_file, i + 1);
        if (y < 0 || y >= c_count) {
            parse_fail(labels_file, i + 1,
                       "label " + std::to_string(y) + " out of range [0," + std::to_string(c_count) + ")");
        }
        d.labels.label[i] = static_cast<std::int32_t>(y);
    }

    const std::string features_file = (root / "features.tsv").string();
    const std::vector<std::string> feature_lines = read_lines(features_file);
    if (static_cast<std::int64_t>(feature_lines.size()) != n) {
        throw DataError(features_file + ": " + std::to_string(feature_lines.size()) + " line(s), meta says n = " +
                        std::to_string(n));
    }
    d.x = DenseMatrix(n, f);
    for (std::size_t i = 0; i < feature_lines.size(); ++i) {
        const auto toks = split_tabs(feature_lines[i]);
        if (static_cast<std::int64_t>(toks.size()) != f) {
            parse_fail(features_file, i + 1,
                       std::to_string(toks.size()) + " column(s), meta says f = " + std::to_string(f));
        }
        double* row = d.x.row_ptr(static_cast<std::int64_t>(i));
        for (std::size_t j = 0; j < toks.size(); ++j) row[j] = parse_real(toks[j], features_file, i + 1);
    }

    const std::string edges_file = (root / "edges.tsv").string();
    const std::vector<std::string> edge_lines = read_lines(edges_file);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(edge_lines.size());
    BundleWarnings counts;
    for (std::size_t i = 0; i < edge_lines.size(); ++i) {
        const auto toks = split_tabs(edge_lines[i]);
        if (toks.size() != 2) parse_fail(edges_file, i + 1, "expected two tab-separated ids");
        const std::int64_t u = parse_int(toks[0], edges_file, i + 1);
        const std::int64_t v = parse_int(toks[1], edges_file, i + 1);
        if (u < 0 || u >= n || v < 0 || v >= n) {
            parse_fail(edges_file, i + 1, "node id out of range [0," + std::to_string(n) + ")");
        }
        if (u == v) {
            counts.self_loops_dropped++;
            continue;
        }
        edges.emplace_back(static_cast<NodeId>(std::min(u, v)), static_cast<NodeId>(std::max(u, v)));
    }
    std::sort(edges.begin(), edges.end());
    const auto last = std::unique(edges.begin(), edges.end());
    counts.duplicate_edges_dropped = static_cast<std::int64_t>(edges.end() - last);
    edges.erase(last, edges.end());

    d.a = build_csr(edges, n, true);
    if (warnings != nullptr) *warnings = counts;
    d.validate();
    return d;
}

void save_bundle(const Dataset& d, const std::string& dir) {
    d.validate();
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw DataError("cannot create directory " + root.string() + ": " + ec.message());

    auto open_out = [](const fs::path& p) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw DataError("cannot write " + p.string());
        return out;
    };

    {
        json meta;
        meta["n"] = d.n();
        meta["f"] = d.feature_dim();
        meta["C"] = d.num_classes();
        meta["name"] = d.name;
        std::ofstream out = open_out(root / "meta.json");
        out << meta.dump(2) << '\n';
    }
    {
        std::ofstream out = open_out(root / "labels.tsv");
        for (std::int32_t y : d.labels.label) out << y << '\n';
    }
    {
        std::ofstream out = open_out(root / "features.tsv");
        char buf[64];
        for (std::int64_t i = 0; i < d.x.rows; ++i) {
            const double* row = d.x.row_ptr(i);
            for (std::int64_t j = 0; j < d.x.cols; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
                if (j > 0) out << '\t';
                out << buf;
            }
            out << '\n';
        }
    }
    {
        std::ofstream out = open_out(root / "edges.tsv");
        for (std::int64_t r = 0; r < d.a.n_rows; ++r) {
            for (NodeId c : d.a.row_cols(r)) {
                if (static_cast<std::int64_t>(c) > r) out << r << '\t' << c << '\n';
            }
        }
    }
}

}  // namespace ncgcn
