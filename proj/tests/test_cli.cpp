#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hqc/cli.hpp"
#include "hqc/random.hpp"
#include "hqc/simulation.hpp"
#include "hqc/text.hpp"

using namespace hqc;
namespace fs = std::filesystem;

namespace {

const fs::path golden = HQC_GOLDEN_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hqc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hqc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

}  // namespace

TEST_CASE("golden: bracket and assoc") {
  auto b = run({"bracket", "qQ", "pQ"});
  CHECK(b.code == 0);
  CHECK(b.out == slurp(golden / "bracket_qQ_pQ.txt"));
  CHECK(b.out == "1\nforms agree: F1 F2 F3 F4\n");

  auto a = run({"check", "assoc", "qC^2", "qC*pC^2", "pC", "--sigma", "0,0,0"});
  CHECK(a.code == 0);
  CHECK(a.out == slurp(golden / "check_assoc.txt"));
  CHECK(a.out.find("verdict: nonzero") != std::string::npos);
  CHECK(a.out.find("residual: -hbar^2*qC*pC") != std::string::npos);
}

TEST_CASE("golden: coupled oscillator simulation") {
  auto dir = scratch("golden");
  auto r = run({"simulate", "--config", (golden / "coupled_oscillator.json").string(), "--csv",
                (dir / "out.csv").string(), "--json", (dir / "out.json").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "out.csv") == slurp(golden / "coupled_oscillator.csv"));
  CHECK(slurp(dir / "out.json") == slurp(golden / "coupled_oscillator.summary.json"));

  // The frozen means follow the normal-mode closed form.
  auto lines = split(slurp(golden / "coupled_oscillator.csv"), '\n');
  REQUIRE(lines.size() == 102);
  CHECK(lines[0] == "t,qQ,pQ,qC,pC,qC^2,qQ*qC,audit_max_abs_dev,energy\r");
  const double wp = std::sqrt(1.1), wm = std::sqrt(0.9);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto cells = split(lines[k], ',');
    double t = std::stod(cells[0]);
    // ⟨qC⟩ with ⟨qQ⟩ = 0.5, ⟨qC⟩ = 1, zero momenta.
    double cs = (std::cos(wp * t) + std::cos(wm * t)) / 2, cd = (std::cos(wp * t) - std::cos(wm * t)) / 2;
    CHECK(std::stod(cells[3]) == doctest::Approx(0.5 * cd + 1.0 * cs).epsilon(1e-12));
    CHECK(std::stod(cells[7]) <= 1e-9);
    CHECK(std::stod(cells[8]) == doctest::Approx(1.185).epsilon(1e-12));
  }
}

TEST_CASE("simulate output is deterministic") {
  auto dir = scratch("determinism");
  for (int k = 0; k < 2; ++k) {
    auto r = run({"simulate", "--config", (golden / "coupled_oscillator.json").string(), "--csv",
                  (dir / ("run" + std::to_string(k) + ".csv")).string(), "--json",
                  (dir / ("run" + std::to_string(k) + ".json")).string()});
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(dir / "run0.csv") == slurp(dir / "run1.csv"));
  CHECK(slurp(dir / "run0.json") == slurp(dir / "run1.json"));

  auto a = run({"nogo-scan", "--seed", "9", "--threads", "1"});
  auto b = run({"nogo-scan", "--seed", "9", "--threads", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(split(a.out, '\n').size() == 27);
}

TEST_CASE("parse/format round trip on random expressions") {
  Rng rng(2024);
  RandomExpressionOptions o;
  o.variables = all_variables(3);
  o.max_degree = 5;
  o.max_terms = 6;
  o.coefficient_range = 9;
  o.complex_coefficients = true;
  o.max_hbar_power = 3;
  for (int k = 0; k < 1000; ++k) {
    auto e = random_expression(rng, o);
    if (k % 7 == 0) e = e * Coefficient(mpq_class(3, 7));
    auto text = format(e);
    CHECK_MESSAGE(parse(text) == e, text);
    CHECK(format(parse(text)) == text);
  }
}

TEST_CASE("exit codes") {
  CHECK(run({"bracket", "qC +", "pC"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"kappa", "--sigma", "1,0,0"}).code == 2);
  CHECK(run({"kappa", "--sigma", "1,2"}).code == 2);
  CHECK(run({"check", "assoc", "qC", "pC", "qC", "--product", "cross"}).code == 2);
  CHECK(run({"simulate", "--config", "/nonexistent/run.json"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  // A refuted check is a result.
  CHECK(run({"certify", "--generators", "qC^2", "pC", "--max-degree", "2"}).code == 0);
  auto nl = scratch("nonlinear");
  {
    std::ofstream f(nl / "cubic.json");
    f << R"({"hamiltonian": {"h_c": "pC^2/2 + qC^3"},
             "state": {"variables": ["qC", "pC"], "mean": [0, 0], "covariance": [[1, 0], [0, 1]]},
             "time": {"stop": 1, "steps": 2}})";
  }
  auto r = run({"simulate", "--config", (nl / "cubic.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("nonlinear") != std::string::npos);
}

TEST_CASE("subcommand outputs") {
  CHECK(run({"star", "qQ", "pQ"}).out == "qQ*pQ + 1/2*i*hbar\n");
  CHECK(run({"ast", "qC", "pC"}).out == "qC*pC + 1/2*i*hbar\n");
  auto k = run({"kappa", "--sigma", "1,1,0"});
  CHECK(k.out == "kappa: qC + i*pC\nkappa: qC - i*pC\n");
  auto m = run({"kappa", "--sigma", "1,0,0", "--member", "qC"});
  CHECK(m.out.find("member: no") == 0);
  auto c = run({"certify", "--generators", "qC", "pC", "qC*pC", "--sigma", "0,0,1", "--max-degree", "1"});
  CHECK(c.out.find("verdict: certified") != std::string::npos);
  auto j = run({"check", "jacobi", "qQ*qC^2", "pQ*qC*pC^2", "qQ*pQ*pC"});
  CHECK(j.out == "verdict: nonzero\nresidual: 2*hbar^2*qC*pC\n");
  auto red = run({"check", "reduction", "--sigma", "1,-1,1"});
  CHECK(red.out.find("verdict: holds") == 0);
}

TEST_CASE("config validation") {
  nlohmann::json base = nlohmann::json::parse(slurp(golden / "coupled_oscillator.json"));
  CHECK_NOTHROW(parse_run_config(base));
  auto with = [&](auto edit) {
    auto doc = base;
    edit(doc);
    return doc;
  };
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["colour"] = 1; })), InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["time"]["dt"] = 1; })), InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["time"]["steps"] = 0; })), InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["method"] = "euler"; })), InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["sigma_c"] = {1, 2}; })), InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["state"]["variables"][0] = "qQ^2"; })),
                  InputError);
  CHECK_THROWS_AS(parse_run_config(with([](auto& d) { d["hamiltonian"]["h_i"] = "qQ*"; })), InputError);
  auto cfg = parse_run_config(with([](auto& d) { d["sigma_c"] = {"1/2", "i", 0.25}; }));
  CHECK(cfg.spec.sigma_c().a == Coefficient(mpq_class(1, 2)));
  CHECK(cfg.spec.sigma_c().b == Coefficient::i());
  CHECK(cfg.spec.sigma_c().c == Coefficient(mpq_class(1, 4)));
  CHECK(cfg.times().size() == 101);
  CHECK(cfg.times().back() == 10.0);
}

TEST_CASE("serialization helpers") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_complex({1.5, -2.0}) == "1.5-2i");
  CHECK(format_complex({0.0, 0.25}) == "0+0.25i");
}
