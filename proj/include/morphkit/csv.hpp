#pragma once

#include "error.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Small CSV helpers for the toolkit's flat file formats. Fields may be
// double-quoted; embedded newlines inside fields are not supported.

namespace morphkit::csv {

inline std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

inline std::string quote_field(const std::string& field)
{
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string join_row(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += ',';
        out += quote_field(fields[i]);
    }
    return out;
}

/// All rows of a CSV file, header included; trailing CR and blank lines dropped.
inline std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(errc::io_failure, path.string() + ": cannot open for reading");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        rows.push_back(split_row(line));
    }
    return rows;
}

inline void write_file(const std::filesystem::path& path,
                       const std::vector<std::vector<std::string>>& rows)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(errc::io_failure, path.string() + ": cannot open for writing");
    for (const auto& row : rows)
        out << join_row(row) << '\n';
    if (!out)
        fail(errc::io_failure, path.string() + ": write error");
}

/// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& context)
{
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        fail(errc::parse_error, context + ": '" + text + "' is not a finite number");
    return v;
}

inline long parse_long(const std::string& text, const std::string& context)
{
    long v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        fail(errc::parse_error, context + ": '" + text + "' is not an integer");
    return v;
}

} // namespace morphkit::csv
