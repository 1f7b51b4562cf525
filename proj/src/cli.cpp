#include "hqc/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "hqc/consistency.hpp"
#include "hqc/simulation.hpp"
#include "hqc/text.hpp"

namespace hqc {

namespace {

SigmaSpec parse_sigma(const std::string& src) {
  std::vector<std::string> parts;
  std::stringstream ss(src);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw InputError("sigma '" + src + "' must be three constants a,b,c");
  return {parse_constant(parts[0]), parse_constant(parts[1]), parse_constant(parts[2])};
}

std::string sigma_text(const SigmaSpec& s) {
  return "(" + to_string(s.a) + ", " + to_string(s.b) + ", " + to_string(s.c) + ")";
}

const char* verdict(bool zero) { return zero ? "zero" : "nonzero"; }

void print_report(std::ostream& out, const std::string& label, const ResidualReport& r) {
  out << label << "verdict: " << verdict(r.is_zero) << '\n';
  out << label << "residual: " << format(r.residual) << '\n';
  for (std::size_t k = 0; k < r.witness.size(); ++k)
    out << label << "witness[" << k << "]: " << format(r.witness[k]) << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
}

struct Options {
  std::string u, v, w;
  std::string sigma = "0,0,0";
  std::string sigma_q = "0,0,0";
  std::string product = "composition";
  std::vector<std::string> generators;
  int max_degree = 1;
  std::string member;
  std::vector<std::string> grid{"default"};
  int degree = 3;
  int trials = 200;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string config, csv, json;
};

ProductSpec spec_of(const Options& o) { return ProductSpec(parse_sigma(o.sigma), parse_sigma(o.sigma_q)); }

ProductKind product_of(const std::string& name) {
  if (name == "composition") return ProductKind::composition;
  if (name == "star") return ProductKind::star;
  if (name == "hybrid") return ProductKind::hybrid;
  if (name == "pointwise") return ProductKind::pointwise;
  if (name == "g") return ProductKind::g;
  throw InputError("unknown product '" + name + "' (composition, star, hybrid, pointwise, g)");
}

int cmd_bracket(const Options& o, std::ostream& out) {
  auto u = parse(o.u), v = parse(o.v);
  auto spec = spec_of(o);
  const BracketForm forms[] = {BracketForm::F1, BracketForm::F2, BracketForm::F3, BracketForm::F4};
  const char* names[] = {"F1", "F2", "F3", "F4"};
  auto value = hybrid_bracket(u, v, spec, BracketForm::F3);
  std::string agree, disagree;
  for (int k = 0; k < 4; ++k) {
    auto& list = hybrid_bracket(u, v, spec, forms[k]) == value ? agree : disagree;
    list += list.empty() ? names[k] : std::string(" ") + names[k];
  }
  out << format(value) << '\n';
  if (!disagree.empty()) throw Error("bracket forms disagree: " + disagree + " differ from F3");
  out << "forms agree: " << agree << '\n';
  return 0;
}

int cmd_check(const std::string& which, const Options& o, std::ostream& out) {
  auto spec = spec_of(o);
  if (which == "reduction") {
    auto r = check_reduction(spec, o.seed, o.trials);
    out << "verdict: " << (r.all_hold() ? "holds" : "fails") << '\n';
    print_report(out, "quantum-classical ", r.quantum_classical);
    print_report(out, "quantum-any ", r.quantum_any);
    print_report(out, "classical-any ", r.classical_any);
    return 0;
  }
  auto u = parse(o.u), v = parse(o.v), w = parse(o.w);
  if (which == "assoc") {
    auto r = ResidualReport::of(associator(u, v, w, product_of(o.product), spec), {u, v, w});
    out << "verdict: " << verdict(r.is_zero) << '\n';
    out << "residual: " << format(r.residual) << '\n';
  } else if (which == "jacobi") {
    auto r = jacobi_residual(u, v, w, spec);
    out << "verdict: " << verdict(r.is_zero) << '\n';
    out << "residual: " << format(r.residual) << '\n';
  } else {
    auto r = leibniz_residual(u, v, w, spec);
    print_report(out, "composition ", r.composition);
    print_report(out, "pointwise ", r.pointwise);
  }
  return 0;
}

int cmd_certify(const Options& o, std::ostream& out) {
  std::vector<Expression> gens;
  for (const auto& g : o.generators) gens.push_back(parse(g));
  auto cert = certify_subalgebra(gens, parse_sigma(o.sigma), o.max_degree);
  out << "sigma: " << sigma_text(cert.sigma) << '\n';
  out << "max degree: " << cert.max_degree << '\n';
  out << "basis size: " << cert.basis.size() << '\n';
  out << "verdict: " << (cert.certified() ? "certified" : "refuted") << '\n';
  if (!cert.certified()) {
    for (std::size_t k = 0; k < cert.witness.size(); ++k)
      out << "witness[" << k << "]: " << format(cert.witness[k]) << '\n';
    out << "associator: " << format(cert.witness_associator) << '\n';
  }
  return 0;
}

int cmd_kappa(const Options& o, std::ostream& out) {
  auto s = parse_sigma(o.sigma);
  if (!o.member.empty()) {
    auto r = minimal_membership(parse(o.member), s, o.seed);
    out << "member: " << (r.member() ? "yes" : "no") << '\n';
    out << "condition residual: " << format(r.condition.residual) << '\n';
    out << "functional residual: " << format(r.functional.residual) << '\n';
    return 0;
  }
  for (const auto& k : kappa_linear(s)) {
    if (auto e = k.expression())
      out << "kappa: " << format(*e) << '\n';
    else
      out << "kappa: qC + (" << to_string(k.p_coefficient) << ")*pC\n";
  }
  return 0;
}

int cmd_nogo(const Options& o, std::ostream& out) {
  std::vector<SigmaSpec> grid;
  for (const auto& g : o.grid) {
    if (g == "default") {
      auto d = default_sigma_grid();
      grid.insert(grid.end(), d.begin(), d.end());
    } else {
      grid.push_back(parse_sigma(g));
    }
  }
  for (const auto& w : nogo_scan(grid, o.degree, o.trials, o.seed, o.threads))
    out << sigma_text(w.sigma) << ": " << format(w.u) << " | " << format(w.v) << " | " << format(w.w)
        << " -> " << format(w.associator) << '\n';
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  auto config = load_run_config(o.config);
  if (!o.csv.empty()) config.csv_path = o.csv;
  if (!o.json.empty()) config.json_path = o.json;
  auto result = run_simulation(config);
  auto summary = simulation_summary(config, result);
  if (!config.csv_path.empty()) {
    write_file(config.csv_path, simulation_csv(config, result));
    out << "csv: " << config.csv_path.string() << '\n';
  }
  if (!config.json_path.empty()) {
    write_file(config.json_path, summary.dump(2) + "\n");
    out << "json: " << config.json_path.string() << '\n';
  }
  out << "verdicts: " << summary["verdicts"].dump() << '\n';
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact hybrid quantum-classical brackets and simulations", "hqc"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);
  Options o;

  auto add_sigma = [&](CLI::App* cmd) {
    cmd->add_option("--sigma", o.sigma, "classical sigma constants a,b,c")->capture_default_str();
    cmd->add_option("--sigma-q", o.sigma_q, "quantum sigma constants a,b,c")->capture_default_str();
  };
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("u", o.u, "left expression")->required();
    cmd->add_option("v", o.v, "right expression")->required();
  };

  auto* bracket = app.add_subcommand("bracket", "hybrid bracket in all four forms");
  add_pair(bracket);
  add_sigma(bracket);
  auto* star = app.add_subcommand("star", "quantum star product");
  add_pair(star);
  add_sigma(star);
  auto* ast = app.add_subcommand("ast", "classical composition product");
  add_pair(ast);
  add_sigma(ast);

  auto* check = app.add_subcommand("check", "consistency residuals");
  check->require_subcommand(1);
  std::string which;
  for (const char* name : {"jacobi", "leibniz", "assoc"}) {
    auto* sub = check->add_subcommand(name, std::string(name) + " residual of a triple");
    add_pair(sub);
    sub->add_option("w", o.w, "third expression")->required();
    add_sigma(sub);
    if (std::string(name) == "assoc")
      sub->add_option("--product", o.product, "composition, star, hybrid, pointwise or g")
          ->capture_default_str();
    sub->callback([&which, name] { which = name; });
  }
  auto* reduction = check->add_subcommand("reduction", "reduction identities on random factors");
  add_sigma(reduction);
  reduction->add_option("--seed", o.seed)->capture_default_str();
  reduction->add_option("--trials", o.trials)->capture_default_str();
  reduction->callback([&which] { which = "reduction"; });

  auto* certify = app.add_subcommand("certify", "certify an associative subalgebra");
  certify->add_option("--generators", o.generators, "classical generators")->required();
  certify->add_option("--sigma", o.sigma)->capture_default_str();
  certify->add_option("--max-degree", o.max_degree, "longest product of generators")->capture_default_str();

  auto* kappa = app.add_subcommand("kappa", "linear minimal-subalgebra generators");
  kappa->add_option("--sigma", o.sigma)->capture_default_str();
  kappa->add_option("--member", o.member, "test membership of this expression instead");
  kappa->add_option("--seed", o.seed)->capture_default_str();

  auto* nogo = app.add_subcommand("nogo-scan", "search associator witnesses over sigma grids");
  nogo->add_option("--grid", o.grid, "a,b,c triples or 'default' for {-1,0,1}^3")->capture_default_str();
  nogo->add_option("--degree", o.degree)->capture_default_str();
  nogo->add_option("--trials", o.trials)->capture_default_str();
  nogo->add_option("--seed", o.seed)->capture_default_str();
  nogo->add_option("--threads", o.threads, "0 uses HQC_THREADS or all cores")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Heisenberg-picture simulation");
  simulate->add_option("--config", o.config, "run configuration (JSON)")->required();
  simulate->add_option("--csv", o.csv, "override the CSV output path");
  simulate->add_option("--json", o.json, "override the JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bracket) return cmd_bracket(o, out);
    if (*star) {
      out << format(star_q(parse(o.u), parse(o.v), spec_of(o))) << '\n';
      return 0;
    }
    if (*ast) {
      out << format(ast_product(parse(o.u), parse(o.v), spec_of(o))) << '\n';
      return 0;
    }
    if (*check) return cmd_check(which, o, out);
    if (*certify) return cmd_certify(o, out);
    if (*kappa) return cmd_kappa(o, out);
    if (*nogo) return cmd_nogo(o, out);
    if (*simulate) return cmd_simulate(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateScheme& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace hqc
