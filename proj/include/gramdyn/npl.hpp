#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gramdyn::npl {

// A small parametric grammar space. Grammar sigma is a bitmask over the
// num_params binary parameters, bit i holding sigma(i + 1); its label is
// "G" followed by sigma(1) ... sigma(N), so mask 0b01 is "G10".
class ToyUGSpec {
 public:
  static constexpr std::size_t kMaxParams = 8;

  // parses[sigma][s] and output[sigma][s] for each of the 2^N grammars and
  // each string. Throws std::invalid_argument if a grammar puts output mass
  // on a string it cannot parse, or its output does not sum to 1.
  ToyUGSpec(std::size_t num_params, std::vector<std::string> strings,
            std::vector<std::vector<bool>> parses, std::vector<std::vector<double>> output);

  // Null-determiner (parameter 1) and head-final (parameter 2) grammars
  // over the strings N, DN and ND, with true optionality.
  static ToyUGSpec determiner_headedness();

  std::size_t num_params() const { return num_params_; }
  std::size_t num_grammars() const { return std::size_t{1} << num_params_; }
  const std::vector<std::string>& strings() const { return strings_; }
  bool parses(std::uint32_t sigma, std::size_t s) const { return parses_[sigma][s]; }
  double output(std::uint32_t sigma, std::size_t s) const { return output_[sigma][s]; }

  std::size_t string_index(const std::string& s) const;

 private:
  std::size_t num_params_;
  std::vector<std::string> strings_;
  std::vector<std::vector<bool>> parses_;
  std::vector<std::vector<double>> output_;
};

std::string grammar_label(std::uint32_t sigma, std::size_t num_params);

// Parameter probabilities: xi for a learner, x for a population.
struct ParamState {
  std::vector<double> xi;
  double gamma = 0.0;
};

// P(G_sigma) = prod_i x_i^sigma(i) (1 - x_i)^(1 - sigma(i)), indexed by mask.
std::vector<double> grammar_distribution(const ParamState& x);

// Mixture of the grammars' output distributions, indexed like spec.strings().
std::vector<double> string_distribution(const ToyUGSpec& spec, const ParamState& x);

// c(G_sigma) = sum_s P(s) [G_sigma fails s], indexed by mask.
std::vector<double> npl_penalties(const ToyUGSpec& spec, const ParamState& x);

// For each parameter, reward the value the learner used if the sentence
// parsed and the other value if it did not:
//   xi_i <- xi_i + gamma (1 - xi_i)  or  xi_i <- (1 - gamma) xi_i.
void apply_npl(std::span<double> xi, double gamma, std::uint32_t sigma, bool parsed);

// Throws std::invalid_argument if sigma has bits beyond xi.size().
ParamState npl_update(ParamState s, std::uint32_t sigma, bool parsed);

// One naive parameter learner starting from xi_i = 0.5 and fed T strings
// drawn from string_distribution(spec, x). Deterministic in seed.
ParamState simulate_npl_learner(const ToyUGSpec& spec, const ParamState& x, double gamma,
                                std::uint64_t tokens, std::uint64_t seed);

struct NplRun {
  std::vector<ParamState> population;           // population[t] is generation t
  std::vector<std::vector<ParamState>> learners;  // learners[t - 1]: finals feeding t
};

// Iterated learning: generation t + 1 is the mean of the final xi of
// `learners` independent learners exposed to generation t. Learner i of
// generation t uses derive_seed(derive_seed(seed, t), i).
NplRun npl_generations(const ToyUGSpec& spec, const ParamState& x0, std::size_t generations,
                       double gamma, std::uint64_t tokens, std::size_t learners,
                       std::uint64_t seed, bool keep_learners = false);

}  // namespace gramdyn::npl
