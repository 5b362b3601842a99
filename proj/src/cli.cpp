#include "gramdyn/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gramdyn/advantage.hpp"
#include "gramdyn/dynamics.hpp"
#include "gramdyn/error.hpp"
#include "gramdyn/matrix_io.hpp"
#include "gramdyn/npl.hpp"
#include "gramdyn/stability.hpp"

#ifndef GRAMDYN_VERSION
#define GRAMDYN_VERSION "0.0.0"
#endif

namespace gramdyn::cli {
namespace {

using nlohmann::json;

constexpr std::string_view kPresetName = "determiner-headedness";

double parse_number(std::string_view token, std::string_view what) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
    throw UsageError(std::string(what) + ": '" + std::string(token) + "' is not a number");
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(parse_number(text.substr(pos, comma - pos), what));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

AdvantageMatrix matrix_from_constructor(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view cls = spec.substr(0, colon);
  const auto p = parse_list(spec.substr(colon + 1), "matrix parameters");
  auto need = [&](std::size_t count) {
    if (p.size() != count)
      throw UsageError(std::string(cls) + " takes " + std::to_string(count) + " parameters");
  };
  try {
    if (cls == "two-grammar") {
      need(2);
      return two_grammar(p[0], p[1]);
    }
    if (cls == "babelian") {
      if (p.size() == 1) return babelian(3, p[0]);
      need(2);
      if (p[0] != std::floor(p[0]) || p[0] < 2) throw UsageError("babelian: n must be an integer >= 2");
      return babelian(static_cast<std::size_t>(p[0]), p[1]);
    }
    if (cls == "symmetric") {
      need(3);
      return symmetric(p[0], p[1], p[2]);
    }
    if (cls == "quasi-babelian") {
      need(2);
      return quasi_babelian(p[0], p[1]);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(cls) + ": " + e.what());
  }
  throw UsageError("unknown system class '" + std::string(cls) + "'");
}

bool is_constructor_spec(std::string_view text) {
  const std::string_view cls = text.substr(0, text.find(':'));
  return text.find(':') != std::string_view::npos &&
         (cls == "two-grammar" || cls == "babelian" || cls == "symmetric" || cls == "quasi-babelian");
}

AdvantageMatrix resolve_matrix(const MatrixSource& source) {
  try {
    switch (source.kind) {
      case MatrixSource::Kind::none:
        throw UsageError("a matrix source is required (--matrix or --class/--params)");
      case MatrixSource::Kind::constructor:
        return matrix_from_constructor(source.text);
      case MatrixSource::Kind::file:
        return load_matrix_file(source.text);
      case MatrixSource::Kind::inline_json:
        return matrix_from_json(source.inline_doc);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const json::exception& e) {
    throw DataError(std::string("matrix: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("matrix: ") + e.what());
  }
  throw UsageError("no matrix");
}

PopulationState start_state(const RunConfig& c, std::size_t n) {
  if (c.start.size() != n)
    throw UsageError("--start needs " + std::to_string(n) + " comma-separated entries");
  try {
    return PopulationState(c.start);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--start: ") + e.what());
  }
}

Format default_format(Subcommand s) {
  return (s == Subcommand::analyze || s == Subcommand::explore) ? Format::json : Format::csv;
}

Subcommand subcommand_from(std::string_view name) {
  for (auto s : {Subcommand::simulate, Subcommand::learn, Subcommand::analyze, Subcommand::sweep,
                 Subcommand::npl, Subcommand::explore})
    if (to_string(s) == name) return s;
  throw UsageError("unknown subcommand '" + std::string(name) + "'");
}

void check_ranges(const RunConfig& c) {
  const auto s = c.subcommand;
  const bool learns = s == Subcommand::learn || s == Subcommand::npl ||
                      (s == Subcommand::simulate && c.stochastic);
  if (learns) {
    if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
    if (c.tokens < 1) throw UsageError("--tokens must be >= 1");
    if (c.learners < 1) throw UsageError("--learners must be >= 1");
  }
  if (s == Subcommand::simulate && c.generations < 1) throw UsageError("--generations must be >= 1");
  if (s == Subcommand::explore && c.trials < 1) throw UsageError("--trials must be >= 1");
  if (s == Subcommand::explore && (c.n < 2 || c.n > 9)) throw UsageError("--n must lie in [2, 9]");
  if (s == Subcommand::sweep) {
    if (!(c.a > 0.0 && c.a <= 1.0)) throw UsageError("--a must lie in (0, 1]");
    for (double rho : parse_grid(c.rho_grid))
      if (!(rho > 0.0 && rho <= 4.0) || rho * c.a > 1.0)
        throw UsageError("--rho-grid values must lie in (0, 4] with rho * a <= 1");
    if (c.burn_in < 1) throw UsageError("--burn-in must be >= 1");
  }
  if (s == Subcommand::npl) {
    if (c.preset != kPresetName) throw UsageError("unknown preset '" + c.preset + "'");
    if (c.start.size() != 2) throw UsageError("--start needs 2 parameter probabilities");
    for (double v : c.start)
      if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--start entries must lie in [0, 1]");
  }
  if (c.ternary && s != Subcommand::simulate) throw UsageError("--ternary applies to simulate only");
}

// ---- output helpers ---------------------------------------------------------

void write_header_comment(std::ostream& out, const json& config) {
  out << "# " << config.dump() << '\n';
}

json report_json(const RestPointReport& r) {
  return {{"location", r.location.vector()},
          {"kind", std::string(to_string(r.kind))},
          {"residual", r.residual},
          {"eigenvalue_moduli", r.eigenvalue_moduli},
          {"classification", std::string(to_string(r.classification))}};
}

void write_trajectory(std::ostream& out, const RunConfig& c, const json& config,
                      const Trajectory& t) {
  const std::size_t n = t.states.front().size();
  if (c.format == Format::json) {
    json states = json::array();
    for (const auto& s : t.states) states.push_back(s.vector());
    out << json{{"config", config}, {"trajectory", states}}.dump(2) << '\n';
    return;
  }
  write_header_comment(out, config);
  out << "generation";
  for (std::size_t i = 0; i < n; ++i) out << ",p" << i + 1;
  if (c.ternary) out << ",tx,ty";
  out << '\n';
  for (std::size_t g = 0; g < t.states.size(); ++g) {
    out << g;
    for (double v : t.states[g].values()) out << ',' << num(v);
    if (c.ternary) {
      const auto xy = ternary_xy(t.states[g]);
      out << ',' << num(xy[0]) << ',' << num(xy[1]);
    }
    out << '\n';
  }
}

std::string vec_text(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

// ---- subcommands ------------------------------------------------------------

RunResult run_simulate(const RunConfig& c, std::ostream& out) {
  const AdvantageMatrix a = resolve_matrix(c.matrix);
  const PopulationState p0 = start_state(c, a.size());
  if (c.ternary && a.size() != 3) throw UsageError("--ternary needs a 3-grammar system");
  const json config = resolved_config(c);
  const Trajectory t = c.stochastic
                           ? generational_simulation(a, p0, c.generations, {c.gamma, c.tokens},
                                                     c.learners, c.seed)
                           : trajectory(a, p0, c.generations);
  write_trajectory(out, c, config, t);
  return {kExitOk,
          "simulate: " + std::to_string(c.generations) + " generations, final p = " +
              vec_text(t.states.back().values()),
          {}};
}

RunResult run_learn(const RunConfig& c, std::ostream& out) {
  const AdvantageMatrix a = resolve_matrix(c.matrix);
  const PopulationState p = start_state(c, a.size());
  const json config = resolved_config(c);
  const auto learners = simulate_lrp_ensemble(a, p, {c.gamma, c.tokens}, c.learners, c.seed);
  const PopulationState mean = ensemble_mean(learners);
  std::optional<PopulationState> predicted;
  if (a.is_proper()) predicted = reliable_map(a, p);

  if (c.format == Format::json) {
    json rows = json::array();
    for (const auto& l : learners) rows.push_back(l.pi);
    json doc{{"config", config}, {"learners", rows}, {"mean", mean.vector()}};
    doc["reliable_prediction"] = predicted ? json(predicted->vector()) : json(nullptr);
    out << doc.dump(2) << '\n';
  } else {
    write_header_comment(out, config);
    out << "learner";
    for (std::size_t i = 0; i < a.size(); ++i) out << ",pi" << i + 1;
    out << '\n';
    for (std::size_t k = 0; k < learners.size(); ++k) {
      out << k;
      for (double v : learners[k].pi) out << ',' << num(v);
      out << '\n';
    }
  }
  std::string summary = "learn: mean pi over " + std::to_string(c.learners) + " learners = " +
                        vec_text(mean.values());
  if (predicted) summary += ", reliable-learner prediction = " + vec_text(predicted->values());
  return {kExitOk, summary, {}};
}

RunResult run_analyze(const RunConfig& c, std::ostream& out) {
  const AdvantageMatrix a = resolve_matrix(c.matrix);
  const json config = resolved_config(c);
  const auto points = find_rest_points(a);
  std::size_t interior = 0, stable = 0;
  for (const auto& r : points) {
    interior += r.kind == PointKind::interior;
    stable += r.classification == Stability::asymptotically_stable;
  }
  if (c.format == Format::json) {
    json list = json::array();
    for (const auto& r : points) list.push_back(report_json(r));
    out << json{{"config", config}, {"rest_points", list}}.dump(2) << '\n';
  } else {
    write_header_comment(out, config);
    out << "kind,classification,residual,max_modulus";
    for (std::size_t i = 0; i < a.size(); ++i) out << ",p" << i + 1;
    out << '\n';
    for (const auto& r : points) {
      out << to_string(r.kind) << ',' << to_string(r.classification) << ',' << num(r.residual) << ','
          << num(r.eigenvalue_moduli.empty() ? 0.0 : r.eigenvalue_moduli.front());
      for (double v : r.location.values()) out << ',' << num(v);
      out << '\n';
    }
  }
  return {kExitOk,
          "analyze: " + std::to_string(points.size()) + " rest points (" + std::to_string(interior) +
              " interior), " + std::to_string(stable) + " asymptotically stable",
          {}};
}

RunResult run_sweep(const RunConfig& c, std::ostream& out) {
  const auto grid = parse_grid(c.rho_grid);
  const json config = resolved_config(c);
  SweepOptions options;
  options.burn_in = c.burn_in;
  options.start = c.start;
  const OrbitDiagram d = bifurcation_sweep(c.a, grid, options);

  RunResult result{kExitOk, {}, {}};
  for (std::size_t i = 0; i < d.rho_values.size(); ++i)
    if (!d.converged[i])
      result.warnings.push_back("no convergence within burn-in at rho=" + num(d.rho_values[i]));
  const std::string estimate = d.bifurcation_estimate ? num(*d.bifurcation_estimate) : "none";

  if (c.format == Format::json) {
    json rows = json::array();
    for (std::size_t i = 0; i < d.rho_values.size(); ++i)
      rows.push_back({{"rho", d.rho_values[i]},
                      {"limit", d.limit_states[i].vector()},
                      {"iterations", d.iterations[i]},
                      {"converged", static_cast<bool>(d.converged[i])}});
    json doc{{"config", config}, {"orbit", rows}, {"warnings", result.warnings}};
    doc["bifurcation_estimate"] = d.bifurcation_estimate ? json(*d.bifurcation_estimate) : json(nullptr);
    out << doc.dump(2) << '\n';
  } else {
    write_header_comment(out, config);
    out << "rho,p1,p2,p3\n";
    for (std::size_t i = 0; i < d.rho_values.size(); ++i) {
      out << num(d.rho_values[i]);
      for (double v : d.limit_states[i].values()) out << ',' << num(v);
      out << '\n';
    }
    for (const auto& w : result.warnings) out << "# warning: " << w << '\n';
    out << "# bifurcation_estimate=" << estimate << '\n';
  }
  result.summary = "sweep: " + std::to_string(grid.size()) + " grid points, bifurcation_estimate=" + estimate;
  return result;
}

RunResult run_npl(const RunConfig& c, std::ostream& out) {
  const auto spec = npl::ToyUGSpec::determiner_headedness();
  const json config = resolved_config(c);
  const npl::ParamState x0{c.start, 0.0};
  const bool dump = c.dump_learners.has_value();
  const auto run = npl::npl_generations(spec, x0, c.generations, c.gamma, c.tokens, c.learners,
                                        c.seed, dump);
  if (c.format == Format::json) {
    json rows = json::array();
    for (const auto& x : run.population) rows.push_back(x.xi);
    out << json{{"config", config}, {"population", rows}}.dump(2) << '\n';
  } else {
    write_header_comment(out, config);
    out << "generation,x1,x2\n";
    for (std::size_t g = 0; g < run.population.size(); ++g)
      out << g << ',' << num(run.population[g].xi[0]) << ',' << num(run.population[g].xi[1]) << '\n';
  }
  if (dump) {
    std::ofstream side(*c.dump_learners);
    if (!side) throw UsageError("cannot write " + *c.dump_learners);
    write_header_comment(side, config);
    side << "generation,learner,xi1,xi2\n";
    for (std::size_t g = 0; g < run.learners.size(); ++g)
      for (std::size_t k = 0; k < run.learners[g].size(); ++k)
        side << g + 1 << ',' << k << ',' << num(run.learners[g][k].xi[0]) << ','
             << num(run.learners[g][k].xi[1]) << '\n';
  }
  return {kExitOk,
          "npl: " + std::to_string(c.generations) + " generations, final x = " +
              vec_text(run.population.back().xi),
          {}};
}

RunResult run_explore(const RunConfig& c, std::ostream& out) {
  const json config = resolved_config(c);
  const ConjectureReport r = conjecture_explore(c.trials, c.seed, c.n);
  const std::string n_key = std::to_string(r.n), n1_key = std::to_string(r.n + 1);
  if (c.format == Format::json) {
    json examples = json::array();
    for (const auto& ce : r.counterexamples) {
      json points = json::array();
      for (const auto& p : ce.rest_points) points.push_back(report_json(p));
      examples.push_back({{"matrix", matrix_to_json(ce.matrix)}, {"reason", ce.reason}, {"rest_points", points}});
    }
    json doc{{"config", config},
             {"trials", r.trials},
             {"rest_point_counts", {{n_key, r.count_n}, {n1_key, r.count_n_plus_1}, {"other", r.count_other}}},
             {"interior_stable", r.interior_stable},
             {"interior_unstable", r.interior_unstable},
             {"interior_inconclusive", r.interior_inconclusive},
             {"counterexamples", examples}};
    out << doc.dump(2) << '\n';
  } else {
    write_header_comment(out, config);
    out << "trials,count_n,count_n_plus_1,count_other,interior_stable,interior_unstable,"
           "interior_inconclusive,counterexamples\n";
    out << r.trials << ',' << r.count_n << ',' << r.count_n_plus_1 << ',' << r.count_other << ','
        << r.interior_stable << ',' << r.interior_unstable << ',' << r.interior_inconclusive << ','
        << r.counterexamples.size() << '\n';
  }
  return {kExitOk,
          "explore: " + std::to_string(r.trials) + " systems; " + n_key + " rest points: " +
              std::to_string(r.count_n) + ", " + n1_key + ": " + std::to_string(r.count_n_plus_1) +
              ", other: " + std::to_string(r.count_other) + "; stable interiors: " +
              std::to_string(r.interior_stable) + "; counterexamples: " +
              std::to_string(r.counterexamples.size()),
          {}};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::simulate:
      return "simulate";
    case Subcommand::learn:
      return "learn";
    case Subcommand::analyze:
      return "analyze";
    case Subcommand::sweep:
      return "sweep";
    case Subcommand::npl:
      return "npl";
    case Subcommand::explore:
      return "explore";
  }
  return "?";
}

std::vector<double> parse_grid(std::string_view text) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw UsageError("grid must look like start:stop:step");
  const double start = parse_number(text.substr(0, c1), "grid start");
  const double stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "grid stop");
  const double step = parse_number(text.substr(c2 + 1), "grid step");
  if (!(step > 0.0)) throw UsageError("grid step must be positive");
  if (stop < start) throw UsageError("grid stop is below its start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

json resolved_config(const RunConfig& c) {
  json j{{"tool", "gramdyn"},
         {"version", GRAMDYN_VERSION},
         {"subcommand", std::string(to_string(c.subcommand))},
         {"format", c.format == Format::csv ? "csv" : "json"},
         {"seed", c.seed}};
  switch (c.subcommand) {
    case Subcommand::simulate:
      j["matrix"] = matrix_to_json(resolve_matrix(c.matrix));
      j["start"] = c.start;
      j["generations"] = c.generations;
      j["stochastic"] = c.stochastic;
      j["ternary"] = c.ternary;
      if (c.stochastic) {
        j["gamma"] = c.gamma;
        j["tokens"] = c.tokens;
        j["learners"] = c.learners;
      }
      break;
    case Subcommand::learn:
      j["matrix"] = matrix_to_json(resolve_matrix(c.matrix));
      j["start"] = c.start;
      j["gamma"] = c.gamma;
      j["tokens"] = c.tokens;
      j["learners"] = c.learners;
      break;
    case Subcommand::analyze:
      j["matrix"] = matrix_to_json(resolve_matrix(c.matrix));
      break;
    case Subcommand::sweep:
      j["a"] = c.a;
      j["rho_grid"] = c.rho_grid;
      j["burn_in"] = c.burn_in;
      j["start"] = c.start;
      break;
    case Subcommand::npl:
      j["preset"] = c.preset;
      j["start"] = c.start;
      j["generations"] = c.generations;
      j["gamma"] = c.gamma;
      j["tokens"] = c.tokens;
      j["learners"] = c.learners;
      break;
    case Subcommand::explore:
      j["n"] = c.n;
      j["trials"] = c.trials;
      break;
  }
  return j;
}

RunConfig config_from_json(const json& doc) {
  try {
    RunConfig c;
    c.subcommand = subcommand_from(doc.at("subcommand").get<std::string>());
    c.format = doc.value("format", "csv") == "json" ? Format::json : Format::csv;
    c.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("matrix")) {
      c.matrix.kind = MatrixSource::Kind::inline_json;
      c.matrix.inline_doc = doc.at("matrix");
    }
    c.start = doc.value("start", std::vector<double>{});
    c.generations = doc.value("generations", c.generations);
    c.stochastic = doc.value("stochastic", false);
    c.ternary = doc.value("ternary", false);
    c.gamma = doc.value("gamma", c.gamma);
    c.tokens = doc.value("tokens", c.tokens);
    c.learners = doc.value("learners", c.learners);
    c.a = doc.value("a", c.a);
    c.rho_grid = doc.value("rho_grid", c.rho_grid);
    c.burn_in = doc.value("burn_in", c.burn_in);
    c.preset = doc.value("preset", c.preset);
    c.n = doc.value("n", c.n);
    c.trials = doc.value("trials", c.trials);
    check_ranges(c);
    return c;
  } catch (const json::exception& e) {
    throw UsageError(std::string("configuration: ") + e.what());
  }
}

RunConfig config_from_output(std::string_view text) {
  try {
    if (text.starts_with("# ")) {
      const std::size_t eol = text.find('\n');
      return config_from_json(json::parse(text.substr(2, eol == std::string_view::npos ? eol : eol - 2)));
    }
    const json doc = json::parse(text);
    return config_from_json(doc.contains("config") ? doc.at("config") : doc);
  } catch (const json::exception& e) {
    throw UsageError(std::string("no echoed configuration found: ") + e.what());
  }
}

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Grammar competition dynamics: reliable-learner maps, rest points, sweeps, NPL", "gramdyn"};
  app.require_subcommand(1, 1);

  std::string matrix, cls, params, start, format, rho_grid, preset, rerun_file;
  std::optional<std::string> out, dump;
  std::optional<std::size_t> generations, learners, burn_in, trials, n;
  std::optional<std::uint64_t> tokens, seed;
  std::optional<double> gamma, a;
  bool stochastic = false, ternary = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "random seed (default 0)");
    sub->add_option("--out", out, "output path (default: standard output)");
  };
  auto add_matrix = [&](CLI::App* sub) {
    auto* m = sub->add_option("--matrix", matrix,
                              "matrix file, or class:params (two-grammar, babelian, symmetric, quasi-babelian)");
    auto* k = sub->add_option("--class", cls, "system class");
    auto* p = sub->add_option("--params", params, "comma-separated class parameters");
    m->excludes(k);
    k->needs(p);
    p->needs(k);
  };
  auto add_learning = [&](CLI::App* sub) {
    sub->add_option("--gamma", gamma, "learning rate");
    sub->add_option("--tokens", tokens, "input tokens per learner (T)");
    sub->add_option("--learners", learners, "learners per generation");
  };

  auto* simulate = app.add_subcommand("simulate", "iterate the reliable-learner map or simulate generations of learners");
  add_common(simulate);
  add_matrix(simulate);
  add_learning(simulate);
  simulate->add_option("--start", start, "initial state p")->required();
  simulate->add_option("--generations", generations, "number of generations");
  simulate->add_flag("--stochastic", stochastic, "finite LRP learners instead of the reliable map");
  simulate->add_flag("--ternary", ternary, "append barycentric plot columns tx,ty (n = 3)");

  auto* learn = app.add_subcommand("learn", "run LRP learners against a fixed population");
  add_common(learn);
  add_matrix(learn);
  add_learning(learn);
  learn->add_option("--start", start, "population state p")->required();

  auto* analyze = app.add_subcommand("analyze", "locate rest points and classify their stability");
  add_common(analyze);
  add_matrix(analyze);

  auto* sweep = app.add_subcommand("sweep", "orbit diagram of quasi-Babelian systems over rho = b/a");
  add_common(sweep);
  sweep->add_option("--a", a, "common advantage a");
  sweep->add_option("--rho-grid", rho_grid, "start:stop:step");
  sweep->add_option("--burn-in", burn_in, "maximum map iterations per grid point");
  sweep->add_option("--start", start, "initial state");

  auto* npl_cmd = app.add_subcommand("npl", "iterated naive parameter learners on a toy grammar space");
  add_common(npl_cmd);
  add_learning(npl_cmd);
  npl_cmd->add_option("--preset", preset, "grammar space preset")->check(CLI::IsMember({std::string(kPresetName)}));
  npl_cmd->add_option("--start", start, "initial parameter probabilities x1,x2");
  npl_cmd->add_option("--generations", generations, "number of generations");
  npl_cmd->add_option("--dump-learners", dump, "CSV of every learner's final parameters");

  auto* explore = app.add_subcommand("explore", "fuzz random proper systems for rest-point counts and stability");
  add_common(explore);
  explore->add_option("--trials", trials, "number of random systems");
  explore->add_option("--n", n, "number of grammars");

  auto* rerun = app.add_subcommand("rerun", "re-execute the configuration echoed in an output file");
  rerun->add_option("file", rerun_file, "earlier output file")->required();
  rerun->add_option("--out", out, "output path (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (rerun->parsed()) {
    RunConfig c = config_from_output(read_text(rerun_file));
    c.out = out;
    return c;
  }

  RunConfig c;
  const CLI::App* chosen = app.get_subcommands().front();
  c.subcommand = subcommand_from(chosen->get_name());
  switch (c.subcommand) {
    case Subcommand::learn:
      c.learners = 100;
      break;
    case Subcommand::sweep:
      c.start = {0.98, 0.01, 0.01};
      break;
    case Subcommand::npl:
      c.start = {0.99, 0.99};
      c.gamma = 0.01;
      c.tokens = 100'000;
      c.learners = 100;
      break;
    default:
      break;
  }
  c.format = format.empty() ? default_format(c.subcommand) : (format == "json" ? Format::json : Format::csv);
  if (seed) c.seed = *seed;
  if (!start.empty()) c.start = parse_list(start, "--start");
  if (generations) c.generations = *generations;
  if (gamma) c.gamma = *gamma;
  if (tokens) c.tokens = *tokens;
  if (learners) c.learners = *learners;
  if (a) c.a = *a;
  if (!rho_grid.empty()) c.rho_grid = rho_grid;
  if (burn_in) c.burn_in = *burn_in;
  if (!preset.empty()) c.preset = preset;
  if (trials) c.trials = *trials;
  if (n) c.n = *n;
  c.stochastic = stochastic;
  c.ternary = ternary;
  c.out = out;
  c.dump_learners = dump;
  if (!cls.empty()) {
    c.matrix = {MatrixSource::Kind::constructor, cls + ":" + params, {}};
  } else if (!matrix.empty()) {
    c.matrix = {is_constructor_spec(matrix) ? MatrixSource::Kind::constructor : MatrixSource::Kind::file,
                matrix, {}};
  }
  check_ranges(c);
  return c;
}

RunResult run(const RunConfig& c, std::ostream& out) {
  try {
    switch (c.subcommand) {
      case Subcommand::simulate:
        return run_simulate(c, out);
      case Subcommand::learn:
        return run_learn(c, out);
      case Subcommand::analyze:
        return run_analyze(c, out);
      case Subcommand::sweep:
        return run_sweep(c, out);
      case Subcommand::npl:
        return run_npl(c, out);
      case Subcommand::explore:
        return run_explore(c, out);
    }
  } catch (const ImproperMatrixError& e) {
    throw DataError(e.what());
  } catch (const ValidationError& e) {
    throw DataError(e.what());
  }
  throw UsageError("unknown subcommand");
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  try {
    std::ostringstream buffer;
    const RunResult result = run(config, buffer);
    if (config.out) {
      std::ofstream file(*config.out, std::ios::binary);
      if (!file) throw UsageError("cannot write " + *config.out);
      file << buffer.str();
      out << result.summary << '\n';
    } else {
      out << buffer.str();
      err << result.summary << '\n';
    }
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    return result.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gramdyn::cli
