#include "csl/cli/writers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace csl::cli {

std::string format_value(double v) {
    if (std::isnan(v)) throw NonFiniteValue("NaN is not serializable");
    if (std::isinf(v)) {
        if (v > 0) throw NonFiniteValue("+inf is not serializable");
        return "-INF";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_text(const Table& table, const HeaderLines& header) {
    std::string out;
    for (const auto& [key, value] : header) {
        out += "# ";
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ",";
        out += table.columns[c];
    }
    out += "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw IoError("table row width does not match the column count");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += format_value(row[c]);
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace csl::cli
