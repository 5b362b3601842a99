#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gramdyn/cli.hpp"

namespace cli = gramdyn::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("gramdyn_cli_" + name); }

json first_line_config(const std::string& csv) {
  REQUIRE(csv.rfind("# ", 0) == 0);
  return json::parse(csv.substr(2, csv.find('\n') - 2));
}

}  // namespace

TEST_CASE("simulate writes the deterministic trajectory") {
  const auto r = run({"simulate", "--matrix", "two-grammar:0.2,0.1", "--start", "0.01,0.99", "--generations", "30"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  const auto config = json::parse(line.substr(2));
  CHECK(config["seed"] == 0);
  CHECK(config["version"].is_string());
  CHECK(config["matrix"]["entries"][1][0] == 0.2);
  std::getline(lines, line);
  CHECK(line == "generation,p1,p2");
  std::getline(lines, line);
  CHECK(line == "0,0.01,0.98999999999999999");
  std::getline(lines, line);
  double p1 = std::stod(line.substr(line.find(',') + 1));
  CHECK(p1 == doctest::Approx(2 * 0.01 / 1.01).epsilon(1e-15));
  CHECK(r.err.find("simulate: 30 generations") != std::string::npos);
}

TEST_CASE("ternary columns") {
  const auto r = run({"simulate", "--class", "babelian", "--params", "0.1", "--start", "0,0,1", "--generations", "1",
                      "--ternary"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("generation,p1,p2,p3,tx,ty\n0,0,0,1,0.5,0.8660254037844386") != std::string::npos);
  CHECK(run({"simulate", "--matrix", "two-grammar:0.2,0.1", "--start", "0.5,0.5", "--ternary"}).code == 2);
}

TEST_CASE("analyze reports the symmetric interior point") {
  const auto r = run({"analyze", "--class", "symmetric", "--params", "0.05,0.01,0.02"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  const auto& pts = doc["rest_points"];
  REQUIRE(pts.size() == 4);
  const auto& in = pts[3];
  CHECK(in["kind"] == "interior");
  CHECK(in["classification"] == "asymptotically-stable");
  CHECK(in["location"][0].get<double>() == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(in["location"][1].get<double>() == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(in["location"][2].get<double>() == doctest::Approx(0.625).epsilon(1e-10));
  CHECK(in["eigenvalue_moduli"].size() == 2);
  CHECK(r.err.find("4 rest points") != std::string::npos);
}

TEST_CASE("sweep footer") {
  const auto r = run({"sweep", "--a", "0.1", "--rho-grid", "0.05:3:0.05"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("rho,p1,p2,p3\n") != std::string::npos);
  const auto pos = r.out.find("# bifurcation_estimate=");
  REQUIRE(pos != std::string::npos);
  const double est = std::stod(r.out.substr(pos + 23));
  CHECK(std::abs(est - 2.0) < 0.05 + 1e-9);
  // rho = 2 sits on the grid and does not settle within the burn-in
  CHECK(r.out.find("# warning: no convergence within burn-in at rho=2") != std::string::npos);
  CHECK(r.err.find("warning:") != std::string::npos);
}

TEST_CASE("grid parsing") {
  const auto g = cli::parse_grid("0.05:3:0.05");
  CHECK(g.size() == 60);
  CHECK(g.back() == doctest::Approx(3.0));
  CHECK(cli::parse_grid("1:1:0.1").size() == 1);
  CHECK_THROWS_AS(cli::parse_grid("1:0:0.1"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_grid("0:1"), cli::UsageError);
  CHECK_THROWS_AS(cli::parse_grid("a:1:0.1"), cli::UsageError);
}

TEST_CASE("exit codes") {
  CHECK(run({"simulate", "--matrix", "two-grammar:0.2,0.1"}).code == 2);  // missing --start
  CHECK(run({"simulate", "--matrix", "two-grammar:0,0.1", "--start", "0.5,0.5"}).code == 2);
  CHECK(run({"simulate", "--matrix", "warped:0.1", "--start", "0.5,0.5"}).code == 3);  // not a file either
  CHECK(run({"simulate", "--matrix", "two-grammar:0.2,0.1", "--start", "0.5,0.6"}).code == 2);
  CHECK(run({"learn", "--matrix", "two-grammar:0.2,0.1", "--start", "0.5,0.5", "--gamma", "1.5"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"explore", "--trials", "0"}).code == 2);
  CHECK(run({"npl", "--preset", "other"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);

  const auto bad = scratch("unbalanced.json");
  {
    std::ofstream f(bad);
    f << R"({"n": 3, "entries": [[0, 0.3, 0.4], [0.1, 0, 0.2], [0.1, 0.2, 0]]})";
  }
  const auto r = run({"analyze", "--matrix", bad.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("cyclical-balance") != std::string::npos);
  {
    std::ofstream f(bad);
    f << R"({"n": 2, "entries": [[0, 0], [0.1, 0]]})";
  }
  CHECK(run({"analyze", "--matrix", bad.string()}).code == 3);  // improper
  fs::remove(bad);
}

TEST_CASE("matrix files and regions through the cli") {
  const auto path = scratch("regions.json");
  {
    std::ofstream f(path);
    f << R"({"regions": {"1": 0.2, "2": 0.2, "3": 0.2, "12": 0.1, "13": 0.1, "23": 0.1, "123": 0.1}})";
  }
  const auto r = run({"analyze", "--matrix", path.string(), "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("interior,asymptotically-stable") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("rerun reproduces outputs byte for byte") {
  const std::vector<std::vector<std::string>> cases{
      {"simulate", "--matrix", "babelian:0.1", "--start", "0.1,0.9,0", "--generations", "5", "--ternary"},
      {"simulate", "--matrix", "two-grammar:0.2,0.1", "--start", "0.3,0.7", "--generations", "2", "--stochastic",
       "--tokens", "2000", "--gamma", "0.01", "--learners", "3", "--seed", "11"},
      {"learn", "--matrix", "quasi-babelian:0.1,0.15", "--start", "0.2,0.3,0.5", "--tokens", "3000", "--learners",
       "4", "--format", "json", "--seed", "4"},
      {"analyze", "--matrix", "quasi-babelian:0.1,0.15"},
      {"sweep", "--rho-grid", "0.5:2.5:0.5", "--burn-in", "500"},
      {"npl", "--generations", "2", "--tokens", "2000", "--learners", "3", "--seed", "8"},
      {"explore", "--trials", "5", "--seed", "2"},
  };
  int k = 0;
  for (auto args : cases) {
    const auto first = scratch("first" + std::to_string(k));
    const auto second = scratch("second" + std::to_string(k++));
    args.insert(args.end(), {"--out", first.string()});
    const auto a = run(args);
    REQUIRE(a.code == 0);
    CHECK(!a.out.empty());  // summary on stdout when writing a file
    const auto b = run({"rerun", first.string(), "--out", second.string()});
    REQUIRE(b.code == 0);
    CHECK(slurp(first) == slurp(second));
    fs::remove(first);
    fs::remove(second);
  }
}

TEST_CASE("stochastic runs depend on the seed") {
  auto once = [](const std::string& seed) {
    return run({"learn", "--matrix", "babelian:0.1", "--start", "0.2,0.3,0.5", "--tokens", "3000", "--learners", "2",
                "--seed", seed})
        .out;
  };
  CHECK(once("1") == once("1"));
  CHECK(once("1") != once("2"));
  CHECK(first_line_config(once("2"))["seed"] == 2);

  auto npl = [](const std::string& seed) {
    return run({"npl", "--generations", "1", "--tokens", "1000", "--learners", "2", "--seed", seed}).out;
  };
  CHECK(npl("5") == npl("5"));
  CHECK(npl("5") != npl("6"));
}

TEST_CASE("npl output and learner dump") {
  const auto dump = scratch("dump.csv");
  const auto r = run({"npl", "--start", "0.99,0.99", "--generations", "2", "--tokens", "1000", "--learners", "3",
                      "--dump-learners", dump.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("generation,x1,x2\n0,0.98999999999999999,0.98999999999999999\n") != std::string::npos);
  const auto d = slurp(dump);
  CHECK(d.find("generation,learner,xi1,xi2\n1,0,") != std::string::npos);
  CHECK(d.find("\n2,2,") != std::string::npos);
  const auto config = first_line_config(r.out);
  CHECK(config["gamma"] == 0.01);
  CHECK(config["learners"] == 3);
  CHECK(config["preset"] == "determiner-headedness");
  CHECK_FALSE(config.contains("out"));
  fs::remove(dump);
}

TEST_CASE("explore json report") {
  const auto r = run({"explore", "--trials", "10", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  const auto& counts = doc["rest_point_counts"];
  CHECK(counts["3"].get<int>() + counts["4"].get<int>() + counts["other"].get<int>() == 10);
  CHECK(doc["counterexamples"].is_array());
}

TEST_CASE("config round trip") {
  const auto c = cli::parse_args({"sweep", "--a", "0.2", "--rho-grid", "1:2:0.5", "--seed", "3"});
  CHECK(c.subcommand == cli::Subcommand::sweep);
  CHECK(c.start == std::vector<double>{0.98, 0.01, 0.01});
  const auto back = cli::config_from_json(cli::resolved_config(c));
  CHECK(cli::resolved_config(back) == cli::resolved_config(c));
  CHECK_THROWS_AS(cli::config_from_output("no header here"), cli::UsageError);
}
