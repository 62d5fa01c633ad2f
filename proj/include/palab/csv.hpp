#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "palab/errors.hpp"

namespace palab::csv {

/// Shortest representation that round-trips.
inline std::string format(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format(std::uint64_t x) { return std::to_string(x); }

/// Absent values become empty fields.
inline std::string format(const std::optional<double>& x) { return x ? format(*x) : std::string(); }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << quote(row[i]);
    }
    out << "\r\n";
}

/// RFC 4180: one header row, CRLF line endings.
inline void write(std::ostream& out, const Table& table) {
    write_row(out, table.header);
    for (const auto& row : table.rows) write_row(out, row);
}

/// Parses RFC 4180 text (CRLF or LF). The first record is the header.
inline Table read(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, any = false;
    char c;
    auto end_record = [&] {
        record.push_back(field);
        field.clear();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(record);
        record.clear();
        any = false;
    };
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            record.push_back(field);
            field.clear();
        } else if (c == '\n') {
            end_record();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw FormatError("unterminated quoted CSV field");
    if (any) end_record();
    Table t;
    if (records.empty()) throw FormatError("CSV input has no header");
    t.header = records.front();
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != t.header.size())
            throw FormatError("CSV record " + std::to_string(i) + " has " +
                              std::to_string(records[i].size()) + " fields, header has " +
                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(records[i]));
    }
    return t;
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError("'" + s + "' is not a number");
    return v;
}

}  // namespace palab::csv
