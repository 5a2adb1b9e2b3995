#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvt {

/// Formats a double with 17 significant digits; round-trips bit-exactly
/// through a correctly-rounded parser.
std::string format_double(double v);

/// Locale-independent double parse of a full cell; nullopt on failure.
std::optional<double> parse_double(const std::string& cell);

/// Splits one CSV line on commas; no quoting, trailing CR stripped by caller.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a whole text file; throws DataError when the file cannot be opened.
std::string read_text_file(const std::string& path);

/// Parsed CSV text: `#`-prefixed comment lines are skipped, the first real
/// row is the header.
struct CsvDocument {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvDocument parse_csv(const std::string& text, const std::string& origin);

/// FNV-1a 64-bit over a byte string; artifact self-description hashes.
std::uint64_t fnv1a64(const std::string& bytes);
std::string to_hex(std::uint64_t v);

} // namespace cvt
