#pragma once

#include <string>
#include <vector>

#include "opiexit/common.hpp"

namespace opiexit::cli {

// 17 significant digits: enough for exact double round-trips, no locale.
std::string fmt17(double v);

double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);

// Writes to path + ".tmp" then renames, so readers never observe a partial
// file.
void atomic_write(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_string(const CsvTable& t);  // Unix line endings
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

// Column lookup; throws ValidationError naming the column if absent.
std::size_t column_index(const CsvTable& t, const std::string& name);

}  // namespace opiexit::cli
