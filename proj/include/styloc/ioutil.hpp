#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace styloc {

// Error taxonomy mapped to CLI exit codes: usage=1, data=2, external=3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExternalToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip decimal form of a double (std::to_chars), '.' separator.
std::string format_double(double v);

// Minimal RFC-4180 quoting: quotes fields containing comma/quote/newline.
std::string csv_escape(std::string_view field);
std::vector<std::string> csv_split_line(std::string_view line);

}  // namespace styloc
