#include "ineq/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ineq::csv {

std::optional<std::size_t> Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

Table parse(const std::string& text) {
    Table table;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool any_field = false;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
        any_field = true;
    };
    auto end_row = [&]() {
        if (!any_field && row.empty()) return;
        end_field();
        if (table.header.empty())
            table.header = row;
        else
            table.rows.push_back(row);
        row.clear();
        any_field = false;
        field.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true; break;
            case ',': end_field(); break;
            case '\r': break;
            case '\n': end_row(); break;
            default: field.push_back(c);
        }
    }
    if (!field.empty() || any_field) end_row();
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

} // namespace ineq::csv
