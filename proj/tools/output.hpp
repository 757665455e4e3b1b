#pragma once

#include <ostream>
#include <string>

#include <qbt/sweep.hpp>

namespace qbtherm {

enum class Format { Csv, Json };

// `#`-prefixed metadata, one header row, 17 significant digits.
void write_csv(std::ostream& os, const qbt::Table& t);

// Array of records keyed by column name.
void write_json(std::ostream& os, const qbt::Table& t);

void write_table(const qbt::Table& t, Format format, const std::string& path);

}  // namespace qbtherm
