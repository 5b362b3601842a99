#include "gramdyn/matrix_io.hpp"

#include <fstream>
#include <stdexcept>

namespace gramdyn {
namespace {

std::uint32_t subset_from_key(const std::string& key) {
  if (key.empty()) throw std::invalid_argument("empty region key");
  std::uint32_t mask = 0;
  int prev = 0;
  for (char ch : key) {
    if (ch < '1' || ch > '9') throw std::invalid_argument("region key '" + key + "' is not a digit string");
    const int d = ch - '0';
    if (d <= prev) throw std::invalid_argument("region key '" + key + "' is not sorted");
    prev = d;
    mask |= 1u << (d - 1);
  }
  return mask;
}

}  // namespace

AdvantageMatrix matrix_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("matrix document must be a JSON object");
  const bool has_entries = doc.contains("entries");
  const bool has_regions = doc.contains("regions");
  if (has_entries == has_regions)
    throw std::invalid_argument("matrix document needs exactly one of \"entries\" and \"regions\"");

  if (has_entries) {
    const auto rows = doc.at("entries").get<AdvantageMatrix::Rows>();
    if (doc.contains("n") && doc.at("n").get<std::size_t>() != rows.size())
      throw std::invalid_argument("\"n\" does not match the number of rows");
    return AdvantageMatrix::from_rows(rows);
  }

  std::map<std::uint32_t, double> weights;
  std::uint32_t all = 0;
  for (const auto& [key, value] : doc.at("regions").items()) {
    const std::uint32_t mask = subset_from_key(key);
    all |= mask;
    weights[mask] = value.get<double>();
  }
  std::size_t n = 0;
  while ((all >> n) != 0) ++n;
  if (doc.contains("n")) {
    const auto declared = doc.at("n").get<std::size_t>();
    if (declared < n) throw std::invalid_argument("region key names a grammar beyond \"n\"");
    n = declared;
  }
  return from_regions(RegionMeasure(n, weights));
}

nlohmann::json matrix_to_json(const AdvantageMatrix& a) {
  return {{"n", a.size()}, {"entries", a.rows()}};
}

AdvantageMatrix load_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("matrix file " + path.string() + ": " + e.what());
  }
  return matrix_from_json(doc);
}

}  // namespace gramdyn
