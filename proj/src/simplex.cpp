#include "gramdyn/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gramdyn {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::vertex:
      return "vertex";
    case PointKind::boundary:
      return "boundary";
    case PointKind::interior:
      return "interior";
  }
  return "?";
}

PopulationState::PopulationState(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("population state is empty");
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("population state entry outside [0, 1]");
  }
  const double sum = std::accumulate(p_.begin(), p_.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("population state sums to " + std::to_string(sum));
}

PopulationState PopulationState::vertex(std::size_t n, std::size_t i) {
  if (i >= n) throw std::out_of_range("vertex index out of range");
  std::vector<double> p(n, 0.0);
  p[i] = 1.0;
  return PopulationState(std::move(p));
}

PopulationState PopulationState::uniform(std::size_t n) {
  return PopulationState(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

PointKind PopulationState::kind() const {
  if (std::ranges::any_of(p_, [](double v) { return v == 1.0; })) return PointKind::vertex;
  if (std::ranges::any_of(p_, [](double v) { return v == 0.0; })) return PointKind::boundary;
  return PointKind::interior;
}

double max_abs_diff(const PopulationState& a, const PopulationState& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::array<double, 2> ternary_xy(const PopulationState& p) {
  if (p.size() != 3) throw std::invalid_argument("ternary projection needs n = 3");
  return {p[1] + 0.5 * p[2], 0.5 * std::sqrt(3.0) * p[2]};
}

}  // namespace gramdyn
