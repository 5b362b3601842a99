#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gramdyn/advantage.hpp"
#include "gramdyn/simplex.hpp"

namespace gramdyn {

// One generation of reliable learners:
//   p_i' = prod_{j != i} c_j / sum_k prod_{j != k} c_j.
// The product form handles vertices (one zero penalty) exactly; penalties
// are divided by their maximum first, which leaves the map unchanged.
// Throws ImproperMatrixError for an improper matrix and
// std::invalid_argument on a dimension mismatch.
PopulationState reliable_map(const AdvantageMatrix& a, const PopulationState& p);

// p' - p; the components sum to zero.
std::vector<double> increment(const AdvantageMatrix& a, const PopulationState& p);

struct Trajectory {
  std::vector<PopulationState> states;  // states[t] is generation t
  std::size_t generations() const { return states.empty() ? 0 : states.size() - 1; }
};

Trajectory trajectory(const AdvantageMatrix& a, const PopulationState& p0,
                      std::size_t generations);

// A linear reward-penalty learner.
struct LearnerState {
  std::vector<double> pi;
  double gamma = 0.0;
  std::uint64_t tokens_seen = 0;

  // pi_i = 1/n.
  static LearnerState uniform(std::size_t n, double gamma);
};

// In-place reward-penalty step on a probability vector. Success:
//   pi_k <- pi_k + gamma (1 - pi_k), pi_j <- (1 - gamma) pi_j.
// Failure:
//   pi_k <- (1 - gamma) pi_k, pi_j <- gamma / (n - 1) + (1 - gamma) pi_j.
void apply_lrp(std::span<double> pi, double gamma, std::size_t chosen, bool parsed);

// Throws std::out_of_range if chosen >= n.
LearnerState lrp_update(LearnerState s, std::size_t chosen, bool parsed);

struct LearnerConfig {
  double gamma = 0.001;
  std::uint64_t tokens = 1'000'000;
};

// One learner exposed to T tokens from the fixed population p. Each token:
// the learner draws G_k ~ pi and the token (generated by G_g ~ p) fails to
// parse under G_k with probability a_kg. Deterministic in seed.
LearnerState simulate_lrp_learner(const AdvantageMatrix& a, const PopulationState& p,
                                  const LearnerConfig& config, std::uint64_t seed);

// Independent learners; member i uses derive_seed(seed, i).
std::vector<LearnerState> simulate_lrp_ensemble(const AdvantageMatrix& a,
                                                const PopulationState& p,
                                                const LearnerConfig& config,
                                                std::size_t learners, std::uint64_t seed);

// Arithmetic mean of the learners' final pi, in index order.
PopulationState ensemble_mean(std::span<const LearnerState> learners);

// Non-overlapping generations of finite learners: the mean final hypothesis
// of generation t is the population state of generation t + 1.
Trajectory generational_simulation(const AdvantageMatrix& a, const PopulationState& p0,
                                   std::size_t generations, const LearnerConfig& config,
                                   std::size_t learners_per_generation, std::uint64_t seed);

}  // namespace gramdyn
