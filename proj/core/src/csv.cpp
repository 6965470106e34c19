#include "dbmid/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dbmid/errors.hpp"

namespace dbmid {

size_t Table::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw FormatError("csv column not found: " + name);
}

const std::string& Table::cell(size_t row, const std::string& name) const {
    if (row >= rows.size()) throw FormatError("csv row out of range");
    return rows[row][column(name)];
}

namespace {

bool needs_quoting(const std::string& f) {
    return f.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& os, const std::string& f) {
    if (!needs_quoting(f)) {
        os << f;
        return;
    }
    os << '"';
    for (char ch : f) {
        if (ch == '"') os << '"';
        os << ch;
    }
    os << '"';
}

void write_row(std::ostream& os, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        write_field(os, row[i]);
    }
    os << '\n';
}

}  // namespace

void write_csv(const std::string& path, const Table& table) {
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw FormatError("csv row width does not match header");
        }
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_row(os, table.header);
    for (const auto& row : table.rows) write_row(os, row);
    if (!os) throw IoError("write failed: " + path);
}

Table read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    const std::string text = buf.str();

    Table t;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (!any) {
            t.header = row;
            any = true;
        } else {
            if (row.size() != t.header.size())
                throw FormatError("csv row width mismatch in " + path);
            t.rows.push_back(row);
        }
        row.clear();
    };
    for (size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            end_row();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (quoted) throw FormatError("unterminated quote in " + path);
    if (!field.empty() || !row.empty()) end_row();
    if (!any) throw FormatError("empty csv: " + path);
    return t;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_int(long long v) { return std::to_string(v); }

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

double parse_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw FormatError("bad number: '" + s + "'");
    }
    return v;
}

long long parse_int(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw FormatError("bad integer: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
        throw FormatError("bad integer: '" + s + "'");
    }
    return v;
}

}  // namespace dbmid
