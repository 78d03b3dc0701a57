#pragma once

// Minimal locale-independent CSV reading/writing shared by the ingest and I/O modules.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "rdsim/error.hpp"

namespace rdsim::csv {

struct Row {
    std::size_t line = 0;  // 1-based line number in the source file
    std::vector<std::string> fields;
};

struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    }

    std::size_t require_column(std::string_view name) const {
        if (auto c = column(name)) return *c;
        throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "' not found in " + path);
    }
};

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    Table table;
    table.path = path;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        table.rows.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw Error(ErrorCode::MalformedRow, path + ": missing header line");
    return table;
}

inline const std::string& field(const Table& t, const Row& row, std::size_t col) {
    if (col >= row.fields.size()) {
        throw Error(ErrorCode::MalformedRow, t.path + ":" + std::to_string(row.line) + ": too few fields");
    }
    return row.fields[col];
}

inline double to_double(const Table& t, const Row& row, std::size_t col) {
    const std::string& s = field(t, row, col);
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::MalformedRow, t.path + ":" + std::to_string(row.line) + ": column '" +
                                                 t.header[col] + "' is not a number: '" + s + "'");
    }
    return value;
}

inline long long to_int(const Table& t, const Row& row, std::size_t col) {
    const double v = to_double(t, row, col);
    if (!(std::abs(v) < 9.0e15) || std::trunc(v) != v) {
        throw Error(ErrorCode::MalformedRow, t.path + ":" + std::to_string(row.line) + ": column '" +
                                                 t.header[col] + "' is not an integer");
    }
    return static_cast<long long>(v);
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

/// Fixed-point representation with the given number of decimals.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    std::string s(buf, ptr);
    if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
    return out;
}

inline void close_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path);
}

}  // namespace rdsim::csv
