#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mfrac/grid.hpp"

namespace mfrac {

/// {"dimension": n, "level": L, "values": [...], "nonneg": bool},
/// values in lexicographic cell order.
nlohmann::json grid_function_to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

/// Flat CSV: "# dimension=n" / "# level=L" header lines, one value per line.
std::string grid_function_to_csv(const GridFunction& f);
GridFunction grid_function_from_csv(std::istream& in);

/// Dispatch on extension (.json / .csv).
void write_grid_function(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_grid_function(const std::filesystem::path& path);

/// Canonical serialization: sorted keys, 2-space indent, trailing newline.
/// Used for every artifact output so reruns are byte-identical.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json load_json(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, const std::string& text);

} // namespace mfrac
