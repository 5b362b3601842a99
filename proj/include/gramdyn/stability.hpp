#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gramdyn/advantage.hpp"
#include "gramdyn/simplex.hpp"

namespace gramdyn {

enum class Stability { asymptotically_stable, unstable, inconclusive };

std::string_view to_string(Stability s);

inline constexpr double kStabilityMargin = 1e-7;

// Stable iff every modulus < 1 - margin, unstable iff some modulus > 1 + margin.
Stability classify(std::span<const double> moduli, double margin = kStabilityMargin);

// Jacobian of the reliable map restricted to the simplex, in a chart of
// n - 1 free coordinates. The largest component of p (ties: highest index)
// is the dependent one, so the chart is (p_1, ..., p_{n-1}) whenever p_n is
// a maximal component. Central differences with step h; a second-order
// forward stencil for coordinates within h of 0.
Eigen::MatrixXd chart_jacobian(const AdvantageMatrix& a, const PopulationState& p,
                               double h = 1e-6);

// Moduli of all eigenvalues, sorted descending. Throws std::invalid_argument
// for a non-square matrix.
std::vector<double> eigen_moduli(const Eigen::MatrixXd& m);

struct RestPointReport {
  PopulationState location;
  PointKind kind;
  // Interior: max_i |c_i p_i - mean_j c_j p_j|. Otherwise max_i |p_i' - p_i|.
  double residual = 0.0;
  std::vector<double> eigenvalue_moduli;
  Stability classification = Stability::inconclusive;
};

struct RestPointOptions {
  double tol = 1e-12;          // Newton stops when max |c_i p_i - c_n p_n| < tol
  std::size_t starts = 50;
  double dedup = 1e-8;         // infinity-norm
  double interior_floor = 1e-7;
  double h = 1e-6;
  double margin = kStabilityMargin;
};

RestPointReport analyze_point(const AdvantageMatrix& a, const PopulationState& p,
                              const RestPointOptions& options = {});

// The n vertices followed by every interior solution of c_1 p_1 = ... = c_n p_n
// found by damped Newton from quasi-random interior starts. Throws
// ImproperMatrixError for an improper matrix.
std::vector<RestPointReport> find_rest_points(const AdvantageMatrix& a,
                                              const RestPointOptions& options = {});

enum class SystemClass { babelian, symmetric, quasi_babelian };

// Closed-form interior rest point.
//   babelian        params {a} (n = 3) or {n, a}: the uniform state
//   symmetric       params {a, b, c}: (c, b, a) / (a + b + c)
//   quasi_babelian  params {a, b}: with rho = b/a,
//                   (1, 2 - rho, 2 - rho) / (5 - 2 rho), none for rho >= 2
// Throws std::invalid_argument for a wrong parameter count.
std::optional<PopulationState> analytic_rest_point(SystemClass cls,
                                                   std::span<const double> params);

struct SweepOptions {
  std::size_t burn_in = 10'000;
  double tol = 1e-12;
  std::vector<double> start{0.98, 0.01, 0.01};
};

struct OrbitDiagram {
  std::vector<double> rho_values;
  std::vector<PopulationState> limit_states;
  std::vector<std::size_t> iterations;
  std::vector<bool> converged;
  // Smallest grid rho whose limit has p_1 > 1 - 1e-6.
  std::optional<double> bifurcation_estimate;
};

// Orbit diagram of quasi_babelian(a, rho a) over rho_grid. Throws
// std::invalid_argument for an empty grid or a rho outside (0, 4].
OrbitDiagram bifurcation_sweep(double a, std::span<const double> rho_grid,
                               const SweepOptions& options = {});

struct Counterexample {
  AdvantageMatrix matrix;
  std::vector<RestPointReport> rest_points;
  std::string reason;
};

struct ConjectureReport {
  std::size_t n = 3;
  std::size_t trials = 0;
  std::size_t count_n = 0;         // vertices only
  std::size_t count_n_plus_1 = 0;  // vertices plus one interior point
  std::size_t count_other = 0;
  std::size_t interior_stable = 0;
  std::size_t interior_unstable = 0;
  std::size_t interior_inconclusive = 0;
  std::vector<Counterexample> counterexamples;
};

// Samples proper matrices through from_regions on uniformly distributed
// region measures and tallies rest-point counts and interior stability.
// Nothing is asserted; departures from "n or n + 1 rest points, interior
// stable" are recorded as counterexamples. Throws std::invalid_argument
// when trials == 0.
ConjectureReport conjecture_explore(std::size_t trials, std::uint64_t seed,
                                    std::size_t n = 3);

}  // namespace gramdyn
