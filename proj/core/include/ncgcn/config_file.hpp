#pragma once

#include <map>
#include <string>

#include "ncgcn/sbm.hpp"
#include "ncgcn/train.hpp"

namespace ncgcn {

using FlatConfig = std::map<std::string, std::string>;

/// Parse `key = value` lines. '#' starts a comment, blank lines are skipped,
/// duplicate keys are an error (ConfigError, line-addressed).
FlatConfig parse_flat_config(const std::string& path);
FlatConfig parse_flat_config_text(const std::string& text, const std::string& origin);

/// Strict mapping onto TrainConfig: unknown keys are rejected, values are
/// fully consumed, the result is validated. The seed is not a file key; it
/// comes from the caller (CLI --seeds).
TrainConfig train_config_from(const FlatConfig& cfg);

/// Canonical string form of every TrainConfig field, for self-describing
/// reports.
std::map<std::string, std::string> train_config_echo(const TrainConfig& cfg);

/// Synthetic-dataset spec: `kind = sbm` (default, full SbmSpec keys) or
/// `kind = mixed_confusion` (keys n, seed, name only).
struct SynthSpec {
    bool mixed = false;
    SbmSpec sbm;
    std::int64_t mixed_n = 1000;
    std::uint64_t mixed_seed = 0;
    std::string name;  // optional override, empty keeps the generator default
};

SynthSpec synth_spec_from(const FlatConfig& cfg);

}  // namespace ncgcn
