#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace curvegas::io {

// Shortest round-trip decimal form (printf %.17g); used for every numeric
// cell we persist so reruns compare byte-for-byte.
std::string format_double(double v);

// One CSV document: header row plus numeric rows, all cells round-trip
// formatted, '\n' line endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Writes via a sibling temp file and an atomic rename, creating parent
// directories as needed, so readers never observe a half-written artifact.
void atomic_write_text(const std::filesystem::path& path, std::string_view text);

// dump(2) + trailing newline through the same temp-and-rename path.
void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace curvegas::io
