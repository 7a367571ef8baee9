#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nesslab/types.hpp"

namespace nesslab::csv {

/// CSV table with a header row, numeric body, and comment footers; numbers are
/// printed with %.17g so identical runs produce byte-identical files.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> footers;  // written as "# <text>" lines
};

void write(const std::filesystem::path& path, const Table& table);

std::string format_double(double v);

/// FNV-1a hash of a canonical string; used for the config-hash footer.
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace nesslab::csv
