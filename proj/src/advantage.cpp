#include "gramdyn/advantage.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gramdyn/error.hpp"

namespace gramdyn {
namespace {

std::vector<double> flatten(const AdvantageMatrix::Rows& rows) {
  const std::size_t n = rows.size();
  if (n < 2) throw std::invalid_argument("advantage matrix needs n >= 2");
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("advantage matrix is not square");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("advantage matrix entry is not finite");
      flat.push_back(v);
    }
  }
  return flat;
}

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
}

}  // namespace

AdvantageMatrix AdvantageMatrix::unchecked(const Rows& rows) {
  return AdvantageMatrix(rows.size(), flatten(rows));
}

AdvantageMatrix AdvantageMatrix::from_rows(const Rows& rows) {
  AdvantageMatrix m = unchecked(rows);
  const ValidationReport report = validate(m);
  if (!report.ok) {
    std::ostringstream msg;
    msg << "invalid advantage matrix:";
    for (const auto& v : report.violations) {
      msg << ' ' << v.rule << '(';
      for (std::size_t k = 0; k < v.indices.size(); ++k) msg << (k ? "," : "") << v.indices[k] + 1;
      msg << ")=" << v.residual;
    }
    throw ValidationError(msg.str());
  }
  return m;
}

bool AdvantageMatrix::is_proper() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j && !((*this)(i, j) > 0.0)) return false;
  return true;
}

AdvantageMatrix AdvantageMatrix::scaled(double factor) const {
  std::vector<double> out(a_);
  for (double& v : out) v *= factor;
  return AdvantageMatrix(n_, std::move(out));
}

AdvantageMatrix::Rows AdvantageMatrix::rows() const {
  Rows out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

ValidationReport validate(const AdvantageMatrix& a) {
  ValidationReport report;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) report.violations.push_back({"zero-diagonal", {i, i}, a(i, i)});
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(i, j);
      if (v < 0.0) report.violations.push_back({"range", {i, j}, v});
      if (v > 1.0) report.violations.push_back({"range", {i, j}, v - 1.0});
    }
  }
  if (n == 3) {
    const double delta_sum =
        (a(1, 0) - a(0, 1)) + (a(2, 1) - a(1, 2)) + (a(0, 2) - a(2, 0));
    if (std::abs(delta_sum) > kCyclicalBalanceTolerance)
      report.violations.push_back({"cyclical-balance", {0, 1, 2}, delta_sum});
  }
  report.ok = report.violations.empty();
  report.proper = a.is_proper();
  return report;
}

RegionMeasure::RegionMeasure(std::size_t n, const std::map<std::uint32_t, double>& weights)
    : n_(n) {
  if (n < 1 || n > kMaxGrammars) throw std::invalid_argument("region measure needs 1 <= n <= 10");
  alpha_.assign(std::size_t{1} << n, 0.0);
  for (const auto& [subset, w] : weights) {
    if (subset == 0 || subset >= alpha_.size())
      throw std::invalid_argument("region subset outside the nonempty subsets of {1..n}");
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("region weight outside [0, 1]");
    alpha_[subset] = w;
  }
  const double sum = total();
  if (std::abs(sum - 1.0) > kRegionSumTolerance)
    throw std::invalid_argument("region weights sum to " + std::to_string(sum) + ", not 1");
}

double RegionMeasure::total() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }

AdvantageMatrix from_regions(const RegionMeasure& m) {
  const std::size_t n = m.size();
  if (n < 2) throw std::invalid_argument("advantage matrix needs n >= 2");
  const double total = m.total();
  AdvantageMatrix::Rows rows(n, std::vector<double>(n, 0.0));
  const std::uint32_t subsets = std::uint32_t{1} << n;
  for (std::uint32_t s = 1; s < subsets; ++s) {
    const double w = m.weight(s) / total;
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (s & (1u << i)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (s & (1u << j)) rows[i][j] += w;
    }
  }
  return AdvantageMatrix::from_rows(rows);
}

AdvantageMatrix two_grammar(double a1, double a2) {
  require_unit_interval(a1, "a1");
  require_unit_interval(a2, "a2");
  return AdvantageMatrix::from_rows({{0.0, a2}, {a1, 0.0}});
}

AdvantageMatrix babelian(std::size_t n, double a) {
  if (n < 2) throw std::invalid_argument("Babelian system needs n >= 2");
  require_unit_interval(a, "a");
  AdvantageMatrix::Rows rows(n, std::vector<double>(n, a));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 0.0;
  return AdvantageMatrix::from_rows(rows);
}

AdvantageMatrix symmetric(double a, double b, double c) {
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  require_unit_interval(c, "c");
  return AdvantageMatrix::from_rows({{0.0, a, b}, {a, 0.0, c}, {b, c, 0.0}});
}

AdvantageMatrix quasi_babelian(double a, double b) {
  require_unit_interval(a, "a");
  require_unit_interval(b, "b");
  return AdvantageMatrix::from_rows({{0.0, a, a}, {b, 0.0, a}, {b, a, 0.0}});
}

PenaltyVector penalties(const AdvantageMatrix& a, const PopulationState& p) {
  const std::size_t n = a.size();
  if (p.size() != n) throw std::invalid_argument("penalties: dimension mismatch");
  PenaltyVector c{std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum += a(i, j) * p[j];
    c.values[i] = sum;
  }
  return c;
}

}  // namespace gramdyn
