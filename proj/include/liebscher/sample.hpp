#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "liebscher/errors.hpp"

namespace liebscher {

// n x d matrix of points in the unit hypercube, row-major.
struct Sample {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> data;

    Sample() = default;
    Sample(std::size_t n_, std::size_t d_) : n(n_), d(d_), data(n_ * d_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * d + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * d, d);
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = at(i, j);
        return col;
    }
};

// Formats a double with 17 significant digits ('.' decimal separator, no
// locale involvement).
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// CSV with header x1,...,xd and '\n' line endings.
inline void write_sample_csv(const Sample& s, std::ostream& os) {
    for (std::size_t j = 0; j < s.d; ++j)
        os << (j ? "," : "") << "x" << (j + 1);
    os << "\n";
    for (std::size_t i = 0; i < s.n; ++i) {
        for (std::size_t j = 0; j < s.d; ++j)
            os << (j ? "," : "") << format_g17(s.at(i, j));
        os << "\n";
    }
}

inline void write_sample_csv(const Sample& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_sample_csv(s, os);
}

inline Sample read_sample_csv(std::istream& is, const std::string& what = "sample") {
    std::string line;
    if (!std::getline(is, line))
        throw SpecParseError(what + ": empty file");
    std::size_t d = 1;
    for (char c : line)
        if (c == ',') ++d;
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t got = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw SpecParseError(what + ": line " + std::to_string(lineno) +
                                     ": cannot parse \"" + cell + "\" as a number");
            }
            ++got;
        }
        if (got != d)
            throw SpecParseError(what + ": line " + std::to_string(lineno) + " has " +
                                 std::to_string(got) + " fields, expected " +
                                 std::to_string(d));
    }
    if (values.empty()) throw SpecParseError(what + ": no data rows");
    Sample s(values.size() / d, d);
    s.data = std::move(values);
    return s;
}

inline Sample read_sample_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SpecParseError("cannot open " + path);
    return read_sample_csv(is, path);
}

}  // namespace liebscher
