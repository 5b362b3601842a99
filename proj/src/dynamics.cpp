#include "gramdyn/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

#include "gramdyn/error.hpp"
#include "gramdyn/rng.hpp"

namespace gramdyn {
namespace {

void require_proper(const AdvantageMatrix& a) {
  if (!a.is_proper())
    throw ImproperMatrixError("the reliable-learner map needs a proper advantage matrix");
}

void require_learning(const LearnerConfig& config) {
  if (!(config.gamma > 0.0 && config.gamma < 1.0))
    throw std::invalid_argument("learning rate must lie in (0, 1)");
  if (config.tokens < 1) throw std::invalid_argument("learner needs at least one token");
}

// Shared by apply_lrp and the simulation loop.
inline void lrp_step(double* pi, std::size_t n, double gamma, std::size_t k, bool parsed) {
  // Both branches shrink every entry by (1 - gamma); a success then adds
  // gamma to the chosen grammar, a failure adds gamma/(n-1) to the others.
  const double keep = 1.0 - gamma;
  const double to_chosen = parsed ? gamma : 0.0;
  const double to_others = parsed ? 0.0 : gamma / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    pi[j] = std::min(1.0, keep * pi[j] + (j == k ? to_chosen : to_others));
}

// Token loop. Extent N > 0 fixes the grammar count at compile time so the
// inner loops unroll; N == 0 handles any n.
template <std::size_t N>
void run_tokens(double* pi, std::size_t n, const double* fail, double gamma, std::uint64_t tokens,
                Rng& rng) {
  if constexpr (N > 0) n = N;
  const double keep = 1.0 - gamma;
  const double boost = gamma / static_cast<double>(n - 1);
  for (std::uint64_t t = 0; t < tokens; ++t) {
    const auto [u_pick, u_parse] = rng.uniform_pair();
    // k counts the cumulative weights at or below u_pick.
    std::size_t k = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc += pi[i];
      k += u_pick >= acc;
    }
    const bool parsed = u_parse >= fail[k];
    const double to_chosen = parsed ? gamma : 0.0;
    const double to_others = parsed ? 0.0 : boost;
    for (std::size_t j = 0; j < n; ++j)
      pi[j] = std::min(1.0, keep * pi[j] + (j == k ? to_chosen : to_others));
  }
}

}  // namespace

PopulationState reliable_map(const AdvantageMatrix& a, const PopulationState& p) {
  require_proper(a);
  const std::size_t n = a.size();
  std::vector<double> c = penalties(a, p).values;
  const double cmax = *std::ranges::max_element(c);
  for (double& v : c) v /= cmax;

  // prod_{j != i} c_j from prefix and suffix products.
  std::vector<double> suffix(n + 1, 1.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] * c[i];
  std::vector<double> next(n);
  double prefix = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = prefix * suffix[i + 1];
    total += next[i];
    prefix *= c[i];
  }
  for (double& v : next) v /= total;
  return PopulationState(std::move(next));
}

std::vector<double> increment(const AdvantageMatrix& a, const PopulationState& p) {
  const PopulationState next = reliable_map(a, p);
  std::vector<double> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) d[i] = next[i] - p[i];
  return d;
}

Trajectory trajectory(const AdvantageMatrix& a, const PopulationState& p0,
                      std::size_t generations) {
  if (generations < 1) throw std::invalid_argument("trajectory needs generations >= 1");
  Trajectory t;
  t.states.reserve(generations + 1);
  t.states.push_back(p0);
  for (std::size_t g = 0; g < generations; ++g) t.states.push_back(reliable_map(a, t.states.back()));
  return t;
}

LearnerState LearnerState::uniform(std::size_t n, double gamma) {
  if (n < 2) throw std::invalid_argument("learner needs at least two grammars");
  return LearnerState{std::vector<double>(n, 1.0 / static_cast<double>(n)), gamma, 0};
}

void apply_lrp(std::span<double> pi, double gamma, std::size_t chosen, bool parsed) {
  if (chosen >= pi.size()) throw std::out_of_range("chosen grammar index out of range");
  if (pi.size() < 2) throw std::invalid_argument("learner needs at least two grammars");
  lrp_step(pi.data(), pi.size(), gamma, chosen, parsed);
}

LearnerState lrp_update(LearnerState s, std::size_t chosen, bool parsed) {
  apply_lrp(s.pi, s.gamma, chosen, parsed);
  ++s.tokens_seen;
  return s;
}

LearnerState simulate_lrp_learner(const AdvantageMatrix& a, const PopulationState& p,
                                  const LearnerConfig& config, std::uint64_t seed) {
  require_learning(config);
  const std::size_t n = a.size();
  // The generating grammar only enters through a_kg, so the chance that
  // G_k fails on a token is its penalty c_k = sum_g a_kg p_g.
  const std::vector<double> fail = penalties(a, p).values;

  LearnerState s = LearnerState::uniform(n, config.gamma);
  Rng rng(seed);
  double* pi = s.pi.data();
  switch (n) {
    case 2:
      run_tokens<2>(pi, n, fail.data(), config.gamma, config.tokens, rng);
      break;
    case 3:
      run_tokens<3>(pi, n, fail.data(), config.gamma, config.tokens, rng);
      break;
    case 4:
      run_tokens<4>(pi, n, fail.data(), config.gamma, config.tokens, rng);
      break;
    default:
      run_tokens<0>(pi, n, fail.data(), config.gamma, config.tokens, rng);
  }
  s.tokens_seen = config.tokens;
  return s;
}


std::vector<LearnerState> simulate_lrp_ensemble(const AdvantageMatrix& a,
                                                const PopulationState& p,
                                                const LearnerConfig& config,
                                                std::size_t learners, std::uint64_t seed) {
  if (learners < 1) throw std::invalid_argument("ensemble needs at least one learner");
  require_learning(config);
  if (p.size() != a.size()) throw std::invalid_argument("dimension mismatch");
  std::vector<LearnerState> out(learners);
  const auto count = static_cast<long long>(learners);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        simulate_lrp_learner(a, p, config, derive_seed(seed, static_cast<std::uint64_t>(i)));
  return out;
}

PopulationState ensemble_mean(std::span<const LearnerState> learners) {
  if (learners.empty()) throw std::invalid_argument("empty ensemble");
  const std::size_t n = learners.front().pi.size();
  std::vector<double> mean(n, 0.0);
  for (const auto& l : learners) {
    if (l.pi.size() != n) throw std::invalid_argument("ensemble members differ in size");
    for (std::size_t i = 0; i < n; ++i) mean[i] += l.pi[i];
  }
  double total = 0.0;
  for (double& v : mean) {
    v = std::clamp(v / static_cast<double>(learners.size()), 0.0, 1.0);
    total += v;
  }
  // Floating-point drift of sum(pi) over long runs is ~1e-13; fold it back.
  for (double& v : mean) v /= total;
  return PopulationState(std::move(mean));
}

Trajectory generational_simulation(const AdvantageMatrix& a, const PopulationState& p0,
                                   std::size_t generations, const LearnerConfig& config,
                                   std::size_t learners_per_generation, std::uint64_t seed) {
  if (learners_per_generation < 1)
    throw std::invalid_argument("need at least one learner per generation");
  Trajectory t;
  t.states.reserve(generations + 1);
  t.states.push_back(p0);
  for (std::size_t g = 0; g < generations; ++g) {
    const auto ensemble = simulate_lrp_ensemble(a, t.states.back(), config,
                                                learners_per_generation, derive_seed(seed, g));
    t.states.push_back(ensemble_mean(ensemble));
  }
  return t;
}

}  // namespace gramdyn
