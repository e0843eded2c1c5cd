#pragma once

#include <stdexcept>
#include <string>

namespace ncgcn {

/// Malformed caller input: bad shapes, ids out of range, non-square matrices.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value: threshold outside (0,1), k not in {1,2}, bad grids.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dataset-level problem: class with too few members, dimension mismatch on disk.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure during optimization, e.g. a non-finite gradient or loss.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken internal invariant (non-partition masks, stale propagation set).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ncgcn
