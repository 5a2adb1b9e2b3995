#pragma once

#include <stdexcept>
#include <string>

namespace cvt {

// Exit-code taxonomy used by the CLI: usage=1, data=2, numeric=3.

/// Bad flags, unknown config keys, out-of-range config values.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing or malformed input files, shape mismatches, degenerate splits.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite losses, impossible normalizations.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cvt
