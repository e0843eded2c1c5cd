#pragma once

#include <cstdint>
#include <string>

#include "ncgcn/dataset.hpp"

namespace ncgcn {

struct BundleWarnings {
    std::int64_t self_loops_dropped = 0;
    std::int64_t duplicate_edges_dropped = 0;
};

/// Read a graph-bundle directory: edges.tsv (one undirected edge per line,
/// two tab-separated ids), features.tsv (n rows of f reals), labels.tsv
/// (n ints), meta.json ({"n","f","C","name"}). Parsing is strict; every
/// error names the file and line. Self-loops and duplicate edges are dropped
/// and counted, everything else is fatal.
Dataset load_bundle(const std::string& dir, BundleWarnings* warnings = nullptr);

/// Inverse of load_bundle. Edges are written once per undirected pair
/// (smaller id first); reals use 17 significant digits so a reload is
/// bit-identical. Creates the directory if needed.
void save_bundle(const Dataset& d, const std::string& dir);

}  // namespace ncgcn
