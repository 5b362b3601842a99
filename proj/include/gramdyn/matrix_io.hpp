#pragma once

#include <filesystem>

#include <json.hpp>

#include "gramdyn/advantage.hpp"

namespace gramdyn {

// Matrix documents hold exactly one of
//   {"n": 3, "entries": [[0, a12, a13], [a21, 0, a23], [a31, a32, 0]]}
//   {"regions": {"1": 0.2, "12": 0.1, "123": 0.1, ...}}
// Region keys list the grammars of the subset as increasing digits 1-9;
// "n" is optional with regions and defaults to the largest digit used.
// Entries are validated; ValidationError or std::invalid_argument on failure.
AdvantageMatrix matrix_from_json(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const AdvantageMatrix& a);

AdvantageMatrix load_matrix_file(const std::filesystem::path& path);

}  // namespace gramdyn
