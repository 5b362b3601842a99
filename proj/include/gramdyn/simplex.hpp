#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gramdyn {

enum class PointKind { vertex, boundary, interior };

std::string_view to_string(PointKind kind);

// A point on the probability simplex: community-level usage rates of the
// n competing grammars.
class PopulationState {
 public:
  static constexpr double kSumTolerance = 1e-12;

  // Throws std::invalid_argument unless every entry is finite and >= 0 and
  // the entries sum to 1 within kSumTolerance.
  explicit PopulationState(std::vector<double> p);

  static PopulationState vertex(std::size_t n, std::size_t i);
  static PopulationState uniform(std::size_t n);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vector() const { return p_; }

  // vertex: some p_i == 1; boundary: some p_i == 0 and no p_i == 1;
  // interior otherwise.
  PointKind kind() const;

  friend bool operator==(const PopulationState&, const PopulationState&) = default;

 private:
  std::vector<double> p_;
};

double max_abs_diff(const PopulationState& a, const PopulationState& b);

// Barycentric projection used for triangle plots (n = 3 only):
// tx = p2 + p3/2, ty = (sqrt 3 / 2) p3.
std::array<double, 2> ternary_xy(const PopulationState& p);

}  // namespace gramdyn
