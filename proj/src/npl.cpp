#include "gramdyn/npl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gramdyn/rng.hpp"

namespace gramdyn::npl {
namespace {

constexpr double kDistTolerance = 1e-12;

void check_params(const ParamState& x) {
  for (double v : x.xi)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("parameter probability outside [0, 1]");
}

inline void npl_step(double* xi, std::size_t n, double gamma, std::uint32_t sigma, bool parsed) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool on = (sigma >> i) & 1u;
    if (on == parsed)
      xi[i] += gamma * (1.0 - xi[i]);
    else
      xi[i] *= 1.0 - gamma;
  }
}

}  // namespace

ToyUGSpec::ToyUGSpec(std::size_t num_params, std::vector<std::string> strings,
                     std::vector<std::vector<bool>> parses,
                     std::vector<std::vector<double>> output)
    : num_params_(num_params),
      strings_(std::move(strings)),
      parses_(std::move(parses)),
      output_(std::move(output)) {
  if (num_params_ < 1 || num_params_ > kMaxParams)
    throw std::invalid_argument("toy UG needs 1 <= N <= 8 parameters");
  const std::size_t g = num_grammars();
  if (parses_.size() != g || output_.size() != g)
    throw std::invalid_argument("toy UG needs one parse row and one output row per grammar");
  for (std::size_t sigma = 0; sigma < g; ++sigma) {
    if (parses_[sigma].size() != strings_.size() || output_[sigma].size() != strings_.size())
      throw std::invalid_argument("toy UG row length differs from the string count");
    double total = 0.0;
    for (std::size_t s = 0; s < strings_.size(); ++s) {
      const double w = output_[sigma][s];
      if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("output probability outside [0, 1]");
      if (w > 0.0 && !parses_[sigma][s])
        throw std::invalid_argument(grammar_label(static_cast<std::uint32_t>(sigma), num_params_) +
                                    " outputs " + strings_[s] + ", which it cannot parse");
      total += w;
    }
    if (std::abs(total - 1.0) > kDistTolerance)
      throw std::invalid_argument("output distribution does not sum to 1");
  }
}

ToyUGSpec ToyUGSpec::determiner_headedness() {
  // Masks: bit 0 = null determiner allowed, bit 1 = head-final.
  //                 N      DN     ND
  return ToyUGSpec(2, {"N", "DN", "ND"},
                   {
                       {false, false, true},  // G00
                       {true, false, true},   // G10
                       {false, true, false},  // G01
                       {true, true, false},   // G11
                   },
                   {
                       {0.0, 0.0, 1.0},
                       {0.5, 0.0, 0.5},
                       {0.0, 1.0, 0.0},
                       {0.5, 0.5, 0.0},
                   });
}

std::size_t ToyUGSpec::string_index(const std::string& s) const {
  const auto it = std::ranges::find(strings_, s);
  if (it == strings_.end()) throw std::invalid_argument("unknown string " + s);
  return static_cast<std::size_t>(it - strings_.begin());
}

std::string grammar_label(std::uint32_t sigma, std::size_t num_params) {
  std::string label = "G";
  for (std::size_t i = 0; i < num_params; ++i) label += ((sigma >> i) & 1u) ? '1' : '0';
  return label;
}

std::vector<double> grammar_distribution(const ParamState& x) {
  check_params(x);
  const std::size_t n = x.xi.size();
  if (n > ToyUGSpec::kMaxParams) throw std::invalid_argument("too many parameters");
  std::vector<double> out(std::size_t{1} << n);
  for (std::uint32_t sigma = 0; sigma < out.size(); ++sigma) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= ((sigma >> i) & 1u) ? x.xi[i] : 1.0 - x.xi[i];
    out[sigma] = p;
  }
  return out;
}

std::vector<double> string_distribution(const ToyUGSpec& spec, const ParamState& x) {
  if (x.xi.size() != spec.num_params()) throw std::invalid_argument("parameter count mismatch");
  const auto grammars = grammar_distribution(x);
  std::vector<double> out(spec.strings().size(), 0.0);
  for (std::uint32_t sigma = 0; sigma < grammars.size(); ++sigma)
    for (std::size_t s = 0; s < out.size(); ++s) out[s] += grammars[sigma] * spec.output(sigma, s);
  return out;
}

std::vector<double> npl_penalties(const ToyUGSpec& spec, const ParamState& x) {
  const auto strings = string_distribution(spec, x);
  std::vector<double> out(spec.num_grammars(), 0.0);
  for (std::uint32_t sigma = 0; sigma < out.size(); ++sigma)
    for (std::size_t s = 0; s < strings.size(); ++s)
      if (!spec.parses(sigma, s)) out[sigma] += strings[s];
  return out;
}

void apply_npl(std::span<double> xi, double gamma, std::uint32_t sigma, bool parsed) {
  if (xi.size() < 32 && (sigma >> xi.size()) != 0)
    throw std::invalid_argument("grammar has more parameters than the learner");
  npl_step(xi.data(), xi.size(), gamma, sigma, parsed);
}

ParamState npl_update(ParamState s, std::uint32_t sigma, bool parsed) {
  apply_npl(s.xi, s.gamma, sigma, parsed);
  return s;
}

ParamState simulate_npl_learner(const ToyUGSpec& spec, const ParamState& x, double gamma,
                                std::uint64_t tokens, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("learning rate must lie in (0, 1)");
  if (tokens < 1) throw std::invalid_argument("learner needs at least one token");
  const std::size_t n = spec.num_params();
  const std::size_t n_strings = spec.strings().size();
  const auto input = string_distribution(spec, x);

  // Flat parse lookup for the inner loop.
  std::vector<unsigned char> parse_table(spec.num_grammars() * n_strings);
  for (std::uint32_t sigma = 0; sigma < spec.num_grammars(); ++sigma)
    for (std::size_t s = 0; s < n_strings; ++s)
      parse_table[sigma * n_strings + s] = spec.parses(sigma, s) ? 1 : 0;

  ParamState learner{std::vector<double>(n, 0.5), gamma};
  double* xi = learner.xi.data();
  Rng rng(seed);
  for (std::uint64_t t = 0; t < tokens; ++t) {
    std::uint32_t sigma = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform() < xi[i]) sigma |= 1u << i;
    const std::size_t s = rng.pick(input);
    npl_step(xi, n, gamma, sigma, parse_table[sigma * n_strings + s] != 0);
  }
  return learner;
}

NplRun npl_generations(const ToyUGSpec& spec, const ParamState& x0, std::size_t generations,
                       double gamma, std::uint64_t tokens, std::size_t learners,
                       std::uint64_t seed, bool keep_learners) {
  if (learners < 1) throw std::invalid_argument("need at least one learner per generation");
  if (x0.xi.size() != spec.num_params()) throw std::invalid_argument("parameter count mismatch");
  check_params(x0);
  NplRun run;
  run.population.push_back(x0);
  for (std::size_t g = 0; g < generations; ++g) {
    const std::uint64_t gen_seed = derive_seed(seed, g);
    const ParamState& current = run.population.back();
    std::vector<ParamState> finals(learners);
    const auto count = static_cast<long long>(learners);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i)
      finals[static_cast<std::size_t>(i)] = simulate_npl_learner(
          spec, current, gamma, tokens, derive_seed(gen_seed, static_cast<std::uint64_t>(i)));

    ParamState mean{std::vector<double>(spec.num_params(), 0.0), x0.gamma};
    for (const auto& f : finals)
      for (std::size_t i = 0; i < mean.xi.size(); ++i) mean.xi[i] += f.xi[i];
    for (double& v : mean.xi) v = std::clamp(v / static_cast<double>(learners), 0.0, 1.0);
    run.population.push_back(std::move(mean));
    if (keep_learners) run.learners.push_back(std::move(finals));
  }
  return run;
}

}  // namespace gramdyn::npl
