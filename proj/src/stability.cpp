#include "gramdyn/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gramdyn/dynamics.hpp"
#include "gramdyn/error.hpp"
#include "gramdyn/rng.hpp"

namespace gramdyn {
namespace {

void require_proper(const AdvantageMatrix& a) {
  if (!a.is_proper()) throw ImproperMatrixError("rest-point analysis needs a proper advantage matrix");
}

std::size_t chart_pivot(const PopulationState& p) {
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] >= p[pivot]) pivot = i;
  return pivot;
}

double interior_residual(const AdvantageMatrix& a, const PopulationState& p) {
  const auto c = penalties(a, p).values;
  std::vector<double> cp(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) cp[i] = c[i] * p[i];
  const double mean = std::accumulate(cp.begin(), cp.end(), 0.0) / static_cast<double>(cp.size());
  double r = 0.0;
  for (double v : cp) r = std::max(r, std::abs(v - mean));
  return r;
}

// Radical-inverse (Halton) coordinates, one prime base per dimension.
double radical_inverse(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

constexpr std::array<std::size_t, 9> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23};

// Start k of a low-discrepancy cover of the simplex: sorted Halton
// coordinates turned into spacings.
std::vector<double> simplex_start(std::size_t n, std::size_t k) {
  std::vector<double> cuts(n - 1);
  for (std::size_t d = 0; d + 1 < n; ++d) cuts[d] = radical_inverse(k + 1, kPrimes[d]);
  std::ranges::sort(cuts);
  std::vector<double> p(n);
  double prev = 0.0;
  for (std::size_t d = 0; d + 1 < n; ++d) {
    p[d] = cuts[d] - prev;
    prev = cuts[d];
  }
  p[n - 1] = 1.0 - prev;
  return p;
}

// Residual r_i = c_i p_i - c_L p_L (L = n - 1) and its Jacobian in the chart
// q = (p_1, ..., p_{n-1}).
struct NewtonSystem {
  const AdvantageMatrix& a;

  Eigen::VectorXd residual(const std::vector<double>& p) const {
    const std::size_t n = p.size(), last = n - 1;
    const auto c = penalties(a, PopulationState(p)).values;
    Eigen::VectorXd r(static_cast<Eigen::Index>(last));
    for (std::size_t i = 0; i < last; ++i)
      r(static_cast<Eigen::Index>(i)) = c[i] * p[i] - c[last] * p[last];
    return r;
  }

  Eigen::MatrixXd jacobian(const std::vector<double>& p) const {
    const std::size_t n = p.size(), last = n - 1;
    const auto c = penalties(a, PopulationState(p)).values;
    Eigen::MatrixXd j(static_cast<Eigen::Index>(last), static_cast<Eigen::Index>(last));
    for (std::size_t i = 0; i < last; ++i)
      for (std::size_t k = 0; k < last; ++k)
        j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            a(i, k) * p[i] + (i == k ? c[i] : 0.0) - a(i, last) * p[i] - a(last, k) * p[last] +
            c[last];
    return j;
  }
};

// Moves to q + step and pulls the result back into the simplex shrunk by eps.
std::vector<double> newton_trial(const std::vector<double>& p, const Eigen::VectorXd& step) {
  constexpr double eps = 1e-12;
  const std::size_t last = p.size() - 1;
  std::vector<double> out(p.size());
  double free_sum = 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    out[i] = p[i] + step(static_cast<Eigen::Index>(i));
    free_sum += out[i];
  }
  out[last] = 1.0 - free_sum;
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v, eps);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::optional<std::vector<double>> newton_solve(const NewtonSystem& sys, std::vector<double> p,
                                                double tol) {
  constexpr int kMaxIterations = 200;
  constexpr int kMaxHalvings = 30;
  Eigen::VectorXd r = sys.residual(p);
  double norm = r.lpNorm<Eigen::Infinity>();
  bool polished = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    if (norm < tol) {
      if (polished) return p;
      polished = true;  // one extra step toward machine precision
    }
    const Eigen::VectorXd step = sys.jacobian(p).fullPivLu().solve(-r);
    if (!step.allFinite()) return norm < tol ? std::optional(p) : std::nullopt;
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      auto trial = newton_trial(p, t * step);
      Eigen::VectorXd rt = sys.residual(trial);
      const double nt = rt.lpNorm<Eigen::Infinity>();
      if (nt < norm) {
        p = std::move(trial);
        r = std::move(rt);
        norm = nt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return norm < tol ? std::optional(p) : std::nullopt;
  }
  return norm < tol ? std::optional(p) : std::nullopt;
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::asymptotically_stable:
      return "asymptotically-stable";
    case Stability::unstable:
      return "unstable";
    case Stability::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Stability classify(std::span<const double> moduli, double margin) {
  if (std::ranges::any_of(moduli, [&](double m) { return m > 1.0 + margin; }))
    return Stability::unstable;
  if (std::ranges::all_of(moduli, [&](double m) { return m < 1.0 - margin; }))
    return Stability::asymptotically_stable;
  return Stability::inconclusive;
}

Eigen::MatrixXd chart_jacobian(const AdvantageMatrix& a, const PopulationState& p, double h) {
  require_proper(a);
  const std::size_t n = p.size();
  if (n != a.size()) throw std::invalid_argument("chart_jacobian: dimension mismatch");
  if (!(h > 0.0 && 4.0 * h * static_cast<double>(n) < 1.0))
    throw std::invalid_argument("chart_jacobian: step must satisfy 0 < h < 1/(4n)");

  const std::size_t pivot = chart_pivot(p);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (i != pivot) free.push_back(i);

  const auto m = static_cast<Eigen::Index>(free.size());
  auto image = [&](std::size_t k, double shift) {
    std::vector<double> q = p.vector();
    q[k] += shift;
    q[pivot] -= shift;
    const PopulationState next = reliable_map(a, PopulationState(std::move(q)));
    Eigen::VectorXd out(m);
    for (Eigen::Index r = 0; r < m; ++r) out(r) = next[free[static_cast<std::size_t>(r)]];
    return out;
  };

  Eigen::MatrixXd j(m, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    const std::size_t k = free[static_cast<std::size_t>(col)];
    if (p[k] >= h) {
      j.col(col) = (image(k, h) - image(k, -h)) / (2.0 * h);
    } else {
      j.col(col) = (-3.0 * image(k, 0.0) + 4.0 * image(k, h) - image(k, 2.0 * h)) / (2.0 * h);
    }
  }
  return j;
}

std::vector<double> eigen_moduli(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigen_moduli: matrix is not square");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration failed");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (const auto& ev : solver.eigenvalues()) out.push_back(std::abs(ev));
  std::ranges::sort(out, std::greater<>());
  return out;
}

RestPointReport analyze_point(const AdvantageMatrix& a, const PopulationState& p,
                              const RestPointOptions& options) {
  const PointKind kind = p.kind();
  const double residual = kind == PointKind::interior ? interior_residual(a, p)
                                                      : max_abs_diff(reliable_map(a, p), p);
  auto moduli = eigen_moduli(chart_jacobian(a, p, options.h));
  const Stability verdict = classify(moduli, options.margin);
  return RestPointReport{p, kind, residual, std::move(moduli), verdict};
}

std::vector<RestPointReport> find_rest_points(const AdvantageMatrix& a,
                                              const RestPointOptions& options) {
  require_proper(a);
  const std::size_t n = a.size();
  if (n - 1 > kPrimes.size()) throw std::invalid_argument("find_rest_points supports n <= 10");

  std::vector<RestPointReport> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(analyze_point(a, PopulationState::vertex(n, i), options));

  const NewtonSystem sys{a};
  std::vector<std::vector<double>> interior;
  for (std::size_t k = 0; k < options.starts; ++k) {
    auto root = newton_solve(sys, simplex_start(n, k), options.tol);
    if (!root) continue;
    if (*std::ranges::min_element(*root) <= options.interior_floor) continue;
    const bool seen = std::ranges::any_of(interior, [&](const std::vector<double>& q) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(q[i] - (*root)[i]));
      return d < options.dedup;
    });
    if (!seen) interior.push_back(std::move(*root));
  }
  std::ranges::sort(interior);
  for (auto& q : interior) out.push_back(analyze_point(a, PopulationState(std::move(q)), options));
  return out;
}

std::optional<PopulationState> analytic_rest_point(SystemClass cls,
                                                   std::span<const double> params) {
  switch (cls) {
    case SystemClass::babelian: {
      if (params.size() == 1) return PopulationState::uniform(3);
      if (params.size() == 2) return PopulationState::uniform(static_cast<std::size_t>(params[0]));
      break;
    }
    case SystemClass::symmetric: {
      if (params.size() != 3) break;
      const double d = params[0] + params[1] + params[2];
      return PopulationState({params[2] / d, params[1] / d, params[0] / d});
    }
    case SystemClass::quasi_babelian: {
      if (params.size() != 2) break;
      const double rho = params[1] / params[0];
      if (rho >= 2.0) return std::nullopt;
      const double d = 5.0 - 2.0 * rho;
      const double minor = (2.0 - rho) / d;
      return PopulationState({1.0 - 2.0 * minor, minor, minor});
    }
  }
  throw std::invalid_argument("analytic_rest_point: wrong number of parameters");
}

OrbitDiagram bifurcation_sweep(double a, std::span<const double> rho_grid,
                               const SweepOptions& options) {
  if (rho_grid.empty()) throw std::invalid_argument("bifurcation_sweep: empty grid");
  for (double rho : rho_grid)
    if (!(rho > 0.0 && rho <= 4.0)) throw std::invalid_argument("bifurcation_sweep: rho outside (0, 4]");
  const PopulationState start(options.start);
  if (start.size() != 3) throw std::invalid_argument("bifurcation_sweep: start must have 3 entries");

  OrbitDiagram d;
  for (double rho : rho_grid) {
    const AdvantageMatrix m = quasi_babelian(a, rho * a);
    PopulationState p = start;
    std::size_t it = 0;
    bool converged = false;
    while (it < options.burn_in) {
      PopulationState next = reliable_map(m, p);
      ++it;
      const double step = max_abs_diff(next, p);
      p = std::move(next);
      if (step < options.tol) {
        converged = true;
        break;
      }
    }
    if (!d.bifurcation_estimate && p[0] > 1.0 - 1e-6) d.bifurcation_estimate = rho;
    d.rho_values.push_back(rho);
    d.limit_states.push_back(std::move(p));
    d.iterations.push_back(it);
    d.converged.push_back(converged);
  }
  return d;
}

ConjectureReport conjecture_explore(std::size_t trials, std::uint64_t seed, std::size_t n) {
  if (trials == 0) throw std::invalid_argument("conjecture_explore: trials must be >= 1");
  if (n < 2 || n > RegionMeasure::kMaxGrammars)
    throw std::invalid_argument("conjecture_explore: n must lie in [2, 10]");

  ConjectureReport report;
  report.n = n;
  report.trials = trials;
  const std::uint32_t subsets = std::uint32_t{1} << n;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    std::optional<AdvantageMatrix> a;
    while (!a || !a->is_proper()) {
      // Uniform on the simplex of region weights: normalized exponentials.
      std::vector<double> e(subsets, 0.0);
      double total = 0.0;
      for (std::uint32_t s = 1; s < subsets; ++s) {
        e[s] = -std::log1p(-rng.uniform());
        total += e[s];
      }
      std::map<std::uint32_t, double> weights;
      for (std::uint32_t s = 1; s < subsets; ++s) weights[s] = e[s] / total;
      a = from_regions(RegionMeasure(n, weights));
    }

    auto points = find_rest_points(*a);
    const std::size_t interior_count = points.size() - n;
    std::string reason;
    if (interior_count == 0) {
      ++report.count_n;
    } else if (interior_count == 1) {
      ++report.count_n_plus_1;
    } else {
      ++report.count_other;
      reason = std::to_string(points.size()) + " rest points";
    }
    for (std::size_t i = n; i < points.size(); ++i) {
      switch (points[i].classification) {
        case Stability::asymptotically_stable:
          ++report.interior_stable;
          break;
        case Stability::unstable:
          ++report.interior_unstable;
          if (reason.empty()) reason = "unstable interior rest point";
          break;
        case Stability::inconclusive:
          ++report.interior_inconclusive;
          if (reason.empty()) reason = "inconclusive interior rest point";
          break;
      }
    }
    if (!reason.empty()) report.counterexamples.push_back({*a, std::move(points), std::move(reason)});
  }
  return report;
}

}  // namespace gramdyn
