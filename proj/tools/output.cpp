#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qbtherm {

namespace {

std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(const qbt::Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return number(*v);
    return std::get<std::string>(c);
}

}  // namespace

void write_csv(std::ostream& os, const qbt::Table& t) {
    for (const auto& [key, value] : t.metadata) os << "# " << key << ": " << value << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
        os << '\n';
    }
}

void write_json(std::ostream& os, const qbt::Table& t) {
    auto records = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json rec;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const double* v = std::get_if<double>(&row[i])) {
                rec[t.columns[i]] = *v;  // non-finite values become null
            } else {
                rec[t.columns[i]] = std::get<std::string>(row[i]);
            }
        }
        records.push_back(std::move(rec));
    }
    os << records.dump(2) << '\n';
}

void write_table(const qbt::Table& t, Format format, const std::string& path) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!path.empty()) {
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file " + path);
        os = &file;
    }
    if (format == Format::Json) {
        write_json(*os, t);
    } else {
        write_csv(*os, t);
    }
    os->flush();
}

}  // namespace qbtherm
