#include "hqc/simulation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hqc/cli.hpp"
#include "hqc/text.hpp"

namespace hqc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("config: " + path + ": " + what);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& j, const std::string& path) {
  double x = number(j, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > 1'000'000)
    fail(path, "expected a positive integer");
  return static_cast<int>(j.get<long long>());
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

Expression expression(const json& j, const std::string& path) {
  try {
    return parse(text(j, path));
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

Coefficient constant(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Coefficient(static_cast<long>(j.get<long long>()));
  if (j.is_number()) return Coefficient::from_double(number(j, path));
  try {
    return parse_constant(text(j, path));
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

SigmaSpec sigma(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected [a, b, c]");
  return {constant(j[0], path + "[0]"), constant(j[1], path + "[1]"), constant(j[2], path + "[2]")};
}

VariableId variable(const json& j, const std::string& path) {
  auto e = expression(j, path);
  if (e.size() == 1) {
    const auto& [key, c] = *e.terms().begin();
    if (c.is_one() && key.hbar_power == 0 && key.monomial.degree() == 1)
      return key.monomial.factors()[0].first;
  }
  fail(path, "expected a single canonical variable such as qC or pQ1");
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<double> RunConfig::times() const {
  std::vector<double> t;
  const double span = t_stop - t_start;
  for (int k = 0; k <= steps; ++k) t.push_back(t_start + span * k / steps);
  return t;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base) {
  check_keys(doc, "", {"sigma_c", "sigma_q", "hbar", "hamiltonian", "state", "time", "method",
                       "observables", "tolerances", "seed", "output"});
  RunConfig c;
  c.echo = doc;
  SigmaSpec sc, sq;
  if (doc.contains("sigma_c")) sc = sigma(doc["sigma_c"], "sigma_c");
  if (doc.contains("sigma_q")) sq = sigma(doc["sigma_q"], "sigma_q");
  c.spec = ProductSpec(sc, sq);
  if (doc.contains("hbar")) c.hbar = positive(doc["hbar"], "hbar");

  if (!doc.contains("hamiltonian")) fail("hamiltonian", "missing");
  const auto& h = doc["hamiltonian"];
  check_keys(h, "hamiltonian", {"h_q", "h_c", "h_i"});
  if (h.contains("h_q")) c.h_q = expression(h["h_q"], "hamiltonian.h_q");
  if (h.contains("h_c")) c.h_c = expression(h["h_c"], "hamiltonian.h_c");
  if (h.contains("h_i")) c.h_i = expression(h["h_i"], "hamiltonian.h_i");

  if (!doc.contains("state")) fail("state", "missing");
  const auto& s = doc["state"];
  check_keys(s, "state", {"variables", "mean", "covariance"});
  for (const char* key : {"variables", "mean", "covariance"})
    if (!s.contains(key)) fail(std::string("state.") + key, "missing");
  if (!s["variables"].is_array()) fail("state.variables", "expected an array");
  for (std::size_t i = 0; i < s["variables"].size(); ++i)
    c.state_variables.push_back(variable(s["variables"][i], "state.variables[" + std::to_string(i) + "]"));
  c.mean = numbers(s["mean"], "state.mean");
  const auto& cov = s["covariance"];
  const std::size_t n = c.state_variables.size();
  if (!cov.is_array() || cov.size() != n) fail("state.covariance", "expected an n×n array");
  c.covariance = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = numbers(cov[i], "state.covariance[" + std::to_string(i) + "]");
    if (row.size() != n) fail("state.covariance[" + std::to_string(i) + "]", "wrong length");
    for (std::size_t j = 0; j < n; ++j) c.covariance(i, j) = row[j];
  }

  if (!doc.contains("time")) fail("time", "missing");
  const auto& t = doc["time"];
  check_keys(t, "time", {"start", "stop", "steps"});
  if (t.contains("start")) c.t_start = number(t["start"], "time.start");
  if (!t.contains("stop")) fail("time.stop", "missing");
  c.t_stop = number(t["stop"], "time.stop");
  if (!(c.t_stop > c.t_start)) fail("time.stop", "must exceed time.start");
  if (!t.contains("steps")) fail("time.steps", "missing");
  c.steps = positive_int(t["steps"], "time.steps");

  if (doc.contains("method")) {
    try {
      c.method = method_from_string(text(doc["method"], "method"));
    } catch (const InputError& e) {
      fail("method", e.what());
    }
  }
  if (doc.contains("observables")) {
    const auto& obs = doc["observables"];
    if (!obs.is_array()) fail("observables", "expected an array of expressions");
    for (std::size_t i = 0; i < obs.size(); ++i)
      c.observables.push_back(expression(obs[i], "observables[" + std::to_string(i) + "]"));
  }
  if (doc.contains("tolerances")) {
    const auto& tol = doc["tolerances"];
    check_keys(tol, "tolerances", {"rk4_dt", "taylor_order", "degree_cap", "squaring_threshold",
                                   "taylor_dt", "taylor_step", "audit", "energy_drift"});
    auto& p = c.propagation;
    if (tol.contains("rk4_dt")) p.rk4_dt = positive(tol["rk4_dt"], "tolerances.rk4_dt");
    if (tol.contains("taylor_order")) p.taylor_order = positive_int(tol["taylor_order"], "tolerances.taylor_order");
    if (tol.contains("degree_cap")) p.degree_cap = positive_int(tol["degree_cap"], "tolerances.degree_cap");
    if (tol.contains("squaring_threshold"))
      p.squaring_threshold = positive(tol["squaring_threshold"], "tolerances.squaring_threshold");
    if (tol.contains("taylor_dt")) p.taylor_dt = positive(tol["taylor_dt"], "tolerances.taylor_dt");
    if (tol.contains("taylor_step")) p.step_tolerance = positive(tol["taylor_step"], "tolerances.taylor_step");
    if (tol.contains("audit")) c.audit_tolerance = positive(tol["audit"], "tolerances.audit");
    if (tol.contains("energy_drift")) c.energy_tolerance = positive(tol["energy_drift"], "tolerances.energy_drift");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    check_keys(o, "output", {"csv", "json"});
    if (o.contains("csv")) c.csv_path = base / text(o["csv"], "output.csv");
    if (o.contains("json")) c.json_path = base / text(o["json"], "output.json");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, file.parent_path());
}

SimulationResult run_simulation(const RunConfig& config) {
  HybridSystem sys(config.h_q, config.h_c, config.h_i, config.spec);
  auto state = GaussianState::make(config.state_variables, config.mean, config.covariance, config.hbar);
  const auto H = sys.hamiltonian();

  SimulationResult result;
  result.times = config.times();
  result.consistent_hybrid = sys.consistent_hybrid();
  result.warnings = state.warnings;
  if (!sys.consistent_hybrid())
    result.warnings.push_back("h_i has classical factors outside a certified subalgebra; hybrid "
                              "variables may not evolve consistently");
  if (!config.spec.sigma_q().is_zero())
    result.warnings.push_back("sigma_q is not zero; expectations pair symbols with the Wigner "
                              "function as in the Weyl scheme");
  if (!config.spec.sigma_c().is_zero() && config.method != Method::taylor)
    result.warnings.push_back("sigma_c is not zero; nonlinear observables are evaluated by "
                              "substituting evolved variables");

  auto options = config.propagation;
  if (config.method == Method::taylor) {
    options.observables = config.observables;
    options.observables.push_back(H);
  }
  auto traj = propagate(sys, result.times, config.method, options, config.state_variables);
  for (auto v : traj.variables) state.index_of(v);

  for (std::size_t k = 0; k < result.times.size(); ++k) {
    std::vector<std::complex<double>> row;
    for (const auto& obs : config.observables) row.push_back(expectation(obs, traj, state, k));
    result.observables.push_back(std::move(row));
    auto audit = canonical_audit(traj, sys, k);
    result.audit_max_abs_dev.push_back(audit.hybrid_max_abs_dev);
    result.max_audit_dev = std::max(result.max_audit_dev, audit.hybrid_max_abs_dev);
    result.max_poisson_dev = std::max(result.max_poisson_dev, audit.poisson_max_abs_dev);
    result.max_moyal_dev = std::max(result.max_moyal_dev, audit.moyal_max_abs_dev);
    result.energy.push_back(expectation(H, traj, state, k));
    result.energy_drift = std::max(result.energy_drift, std::abs(result.energy.back() - result.energy.front()));
  }
  return result;
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // no negative zero in output
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string format_complex(std::complex<double> z) {
  std::string im = format_double(std::abs(z.imag()));
  bool negative = z.imag() < 0.0;
  return format_double(z.real()) + (negative ? "-" : "+") + im + "i";
}

std::string simulation_csv(const RunConfig& config, const SimulationResult& result) {
  std::ostringstream out;
  out << "t";
  for (const auto& obs : config.observables) out << ',' << csv_cell(format(obs));
  out << ",audit_max_abs_dev,energy\r\n";
  for (std::size_t k = 0; k < result.times.size(); ++k) {
    out << format_double(result.times[k]);
    for (const auto& z : result.observables[k]) out << ',' << csv_cell(format_complex(z));
    out << ',' << format_double(result.audit_max_abs_dev[k]) << ','
        << csv_cell(format_complex(result.energy[k])) << "\r\n";
  }
  return out.str();
}

json simulation_summary(const RunConfig& config, const SimulationResult& result) {
  const auto& p = config.propagation;
  json tolerances = {{"rk4_dt", p.rk4_dt},
                     {"taylor_order", p.taylor_order},
                     {"degree_cap", p.degree_cap},
                     {"squaring_threshold", p.squaring_threshold},
                     {"taylor_dt", p.taylor_dt},
                     {"taylor_step", p.step_tolerance},
                     {"audit", config.audit_tolerance},
                     {"energy_drift", config.energy_tolerance}};
  json verdicts = {{"consistent_hybrid", result.consistent_hybrid},
                   {"audit_max_abs_dev", result.max_audit_dev},
                   {"audit_within_tolerance", result.max_audit_dev <= config.audit_tolerance},
                   {"poisson_only_max_abs_dev", result.max_poisson_dev},
                   {"moyal_only_max_abs_dev", result.max_moyal_dev},
                   {"energy_drift", result.energy_drift},
                   {"energy_within_tolerance", result.energy_drift <= config.energy_tolerance}};
  json final_values = json::object();
  for (std::size_t k = 0; k < config.observables.size(); ++k)
    final_values[format(config.observables[k])] = complex_json(result.observables.back()[k]);
  return {{"config", config.echo},
          {"method", to_string(config.method)},
          {"tolerances", tolerances},
          {"verdicts", verdicts},
          {"warnings", result.warnings},
          {"final", {{"t", result.times.back()},
                     {"observables", final_values},
                     {"energy", complex_json(result.energy.back())}}},
          {"versions", {{"hqc", version}, {"json", "nlohmann " + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

}  // namespace hqc
