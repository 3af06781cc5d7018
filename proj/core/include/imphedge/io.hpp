#pragma once

#include <string>
#include <vector>

namespace imphedge {

/// 17 significant digits, enough to round-trip a double exactly.
std::string format_full(double v);

/// Write via a temp file in the same directory plus rename.
void atomic_write_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

/// Numeric CSV with a fixed header; values printed with format_full.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace imphedge
