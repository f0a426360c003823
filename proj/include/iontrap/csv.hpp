#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal CSV writing/reading used by the exports; numbers round-trip
// through max_digits10 formatting.

namespace iontrap::csv {

struct Table {
    std::vector<std::string> comments; // leading '#' lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write(std::ostream& out, const Table& t)
{
    for (const auto& c : t.comments)
        out << "# " << c << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << t.header[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
}

inline void write_file(const std::string& path, const Table& t)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    write(f, t);
}

inline Table read(std::istream& in)
{
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            t.comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!have_header) {
            t.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells)
            row.push_back(std::stod(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table read_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open for reading: " + path);
    return read(f);
}

} // namespace iontrap::csv
