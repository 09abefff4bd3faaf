#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Artifact emission: CSV with a '#' provenance header block and
// RFC-4180 record framing, full round-trip float precision, and
// deterministic bytes for identical inputs.

namespace csl::cli {

struct NonFiniteValue : std::runtime_error {
    explicit NonFiniteValue(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// 17 significant digits.  -inf (an underflowed log magnitude) serializes
// as the sentinel "-INF"; NaN and +inf throw NonFiniteValue.
std::string format_value(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

using HeaderLines = std::vector<std::pair<std::string, std::string>>;

// '# key = value' comment block, one column-name record, then one record
// per row; LF line ends throughout.
std::string csv_text(const Table& table, const HeaderLines& header);

void write_text_file(const std::string& path, const std::string& body);  // throws IoError

}  // namespace csl::cli
