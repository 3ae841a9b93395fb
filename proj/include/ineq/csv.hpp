#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ineq::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by header name; empty when absent.
    std::optional<std::size_t> column(const std::string& name) const;
};

// Minimal RFC-4180-ish reader: quoted fields, embedded commas and quotes.
Table read_file(const std::string& path);
Table parse(const std::string& text);

} // namespace ineq::csv
