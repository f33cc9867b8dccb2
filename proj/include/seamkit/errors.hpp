#pragma once

#include <stdexcept>
#include <string>

namespace seamkit {

// Error taxonomy mirrors the CLI exit codes: validation/input problems exit 2,
// topological failures exit 3, anything else exits 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace seamkit
