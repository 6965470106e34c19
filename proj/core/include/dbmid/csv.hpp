#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dbmid {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws FormatError if absent.
    size_t column(const std::string& name) const;
    const std::string& cell(size_t row, const std::string& name) const;
};

// Writes LF-terminated CSV. Fields containing separators or quotes are
// quoted. Every row must match the header width.
void write_csv(const std::string& path, const Table& table);

Table read_csv(const std::string& path);

// Stable numeric formatting for CSV output ("%.10g"): enough digits to make
// reruns byte-comparable without printing float noise.
std::string fmt_double(double v);
std::string fmt_int(long long v);
std::string fmt_u64(std::uint64_t v);

double parse_double(const std::string& s);
long long parse_int(const std::string& s);
std::uint64_t parse_u64(const std::string& s);

}  // namespace dbmid
