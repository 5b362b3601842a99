#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gramdyn/simplex.hpp"

namespace gramdyn {

// Pairwise advantages a_ij: the probability of a sentence parsed by G_j but
// not by G_i. Stored dense, row-major; n is small.
class AdvantageMatrix {
 public:
  using Rows = std::vector<std::vector<double>>;

  // Throws ValidationError unless validate() passes.
  static AdvantageMatrix from_rows(const Rows& rows);

  // Only the shape (square, n >= 2, finite entries) is checked. Used to
  // probe the dynamics on scaled or otherwise inadmissible matrices.
  static AdvantageMatrix unchecked(const Rows& rows);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  // All off-diagonal entries strictly positive.
  bool is_proper() const;

  AdvantageMatrix scaled(double factor) const;
  Rows rows() const;

  friend bool operator==(const AdvantageMatrix&, const AdvantageMatrix&) = default;

 private:
  AdvantageMatrix(std::size_t n, std::vector<double> entries)
      : n_(n), a_(std::move(entries)) {}

  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct Violation {
  std::string rule;  // "zero-diagonal", "range" or "cyclical-balance"
  std::vector<std::size_t> indices;
  double residual = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  bool proper = false;
};

inline constexpr double kCyclicalBalanceTolerance = 1e-12;
inline constexpr double kRegionSumTolerance = 1e-9;

// Never throws. The cyclical balance rule
//   (a21 - a12) + (a32 - a23) + (a13 - a31) = 0
// is only checked for n = 3; its residual is the signed left-hand side.
ValidationReport validate(const AdvantageMatrix& a);

// Probabilities of the Venn regions: weight(I) is the probability of a
// sentence parsed by exactly the grammars in I. Subsets are bitmasks with
// bit i standing for grammar i + 1.
class RegionMeasure {
 public:
  static constexpr std::size_t kMaxGrammars = 10;

  // Unlisted subsets have weight 0. Throws std::invalid_argument on an
  // empty or out-of-range subset, a weight outside [0, 1], or a total more
  // than kRegionSumTolerance away from 1.
  RegionMeasure(std::size_t n, const std::map<std::uint32_t, double>& weights);

  std::size_t size() const { return n_; }
  double weight(std::uint32_t subset) const { return alpha_.at(subset); }
  double total() const;

 private:
  std::size_t n_;
  std::vector<double> alpha_;  // indexed by subset mask; slot 0 unused
};

// a_ij = sum of weight(I) over the subsets I containing j but not i.
AdvantageMatrix from_regions(const RegionMeasure& m);

// Named families. All reject parameters outside (0, 1].
AdvantageMatrix two_grammar(double a1, double a2);  // [[0, a2], [a1, 0]]
AdvantageMatrix babelian(std::size_t n, double a);
AdvantageMatrix symmetric(double a, double b, double c);
// G1 holds the distinguished advantage: a21 = a31 = b, every other
// off-diagonal entry equals a.
AdvantageMatrix quasi_babelian(double a, double b);

struct PenaltyVector {
  std::vector<double> values;
};

// c_i = sum_{j != i} a_ij p_j, the probability that G_i fails on a token
// drawn from the population.
PenaltyVector penalties(const AdvantageMatrix& a, const PopulationState& p);

}  // namespace gramdyn
