// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>

#include <json.hpp>

#include "ergocheck/analytic.hpp"
#include "ergocheck/cli/config.hpp"
#include "ergocheck/error.hpp"
#include "ergocheck/sde.hpp"
#include "ergocheck/verify.hpp"

namespace ergocheck::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_pair(std::ostream& os, const SolutionPair& pair) {
  os << "# rho=" << format_double(pair.rho) << "\n";
  os << "x,V\n";
  const Grid1D& g = pair.V.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << format_double(g.x(i)) << ',' << format_double(pair.V.values[i]) << '\n';
  }
}

PairTable read_pair(std::istream& is) {
  std::optional<double> rho;
  std::vector<double> xs;
  std::vector<double> vs;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(Errc::ParseError, "pair file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::size_t at = line.find("rho=");
      if (at != std::string::npos) {
        try {
          rho = parse_list(line.substr(at + 4)).at(0);
        } catch (const Error&) {
          fail("malformed rho field");
        }
      }
      continue;
    }
    if (!header) {
      if (line.rfind("x,V", 0) != 0) fail("expected header starting with x,V");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) fail("expected at least two columns");
    try {
      xs.push_back(parse_list(a).at(0));
      vs.push_back(parse_list(b).at(0));
    } catch (const Error&) {
      fail("malformed number");
    }
  }
  if (!rho) throw Error(Errc::ParseError, "pair file has no '# rho=' field");
  if (xs.size() < 2) throw Error(Errc::ParseError, "pair file needs at least two rows");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error(Errc::ParseError, "pair file x column is not strictly increasing");
  }
  return PairTable{*rho, std::move(xs), std::move(vs)};
}

SolutionPair resample_pair(const PairTable& table, const Grid1D& grid) {
  const double slack = 1e-9 * std::max(1.0, grid.half_width());
  if (table.x.front() > -grid.half_width() + slack || table.x.back() < grid.half_width() - slack) {
    throw Error(Errc::InvalidGrid, "pair file does not cover the grid [-L, L]");
  }
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    auto hi = std::lower_bound(table.x.begin(), table.x.end(), x);
    if (hi == table.x.end()) hi = std::prev(hi);
    if (hi == table.x.begin()) hi = std::next(hi);
    const auto k = static_cast<std::size_t>(hi - table.x.begin());
    const double x0 = table.x[k - 1], x1 = table.x[k];
    const double t = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
    v[i] = t == 1.0 ? table.V[k] : (1.0 - t) * table.V[k - 1] + t * table.V[k];
  }
  const bool normalized = v[grid.origin_index()] == 0.0;
  return SolutionPair{ValueFunction{grid, std::move(v), normalized}, table.rho};
}

namespace {

void dump_value(const json& j, int depth, std::string& out) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_value(it.value(), depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_value(j, 0, out);
  return out;
}

namespace {

struct Flags {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::string pair_file;
  std::string expect;
  std::optional<std::uint64_t> seed;
  std::optional<double> L;
  std::optional<std::size_t> N;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  std::optional<double> gap_tol;
  std::optional<double> initial_rho;
  std::optional<double> frozen_rho;
  std::optional<std::string> rho_range;
  std::optional<std::string> alphas;
  std::optional<std::string> radii;
  std::optional<double> T;
  std::optional<double> dt;
  std::optional<std::size_t> paths;
  std::optional<double> x0;
  std::optional<std::string> mode;
  std::optional<double> rho;
  std::string source = "grid";
};

bool is_config_error(Errc c) {
  switch (c) {
    case Errc::InvalidConfig:
    case Errc::ParseError:
    case Errc::InvalidGrid:
    case Errc::InvalidArgument:
    case Errc::DomainError:
    case Errc::InvalidRadius:
      return true;
    default:
      return false;
  }
}

RunConfig load_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw Error(Errc::InvalidConfig, "cannot open config file " + f.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(Errc::ParseError, "config " + f.config_path + ": " + e.what());
    }
    cfg = RunConfig::from_json(j);
  }
  if (f.seed) cfg.sim.seed = *f.seed;
  if (f.L) cfg.L = *f.L;
  if (f.N) cfg.N = *f.N;
  if (f.max_iter) cfg.max_iter = *f.max_iter;
  if (f.tol) cfg.pia_tol = *f.tol;
  if (f.gap_tol) cfg.gap_tol = *f.gap_tol;
  if (f.initial_rho) cfg.initial_policy = PolicySpec{"w_rho", *f.initial_rho, 0.0, ""};
  if (f.frozen_rho) cfg.frozen_policy = PolicySpec{"w_rho", *f.frozen_rho, 0.0, ""};
  if (f.rho_range) cfg.rhos = parse_range(*f.rho_range);
  if (f.alphas) cfg.alphas = parse_list(*f.alphas);
  if (f.radii) cfg.radii = parse_list(*f.radii);
  if (f.T) cfg.sim.T = *f.T;
  if (f.dt) cfg.sim.dt = *f.dt;
  if (f.paths) cfg.sim.n_paths = *f.paths;
  if (f.x0) cfg.exit_x0 = *f.x0;
  if (f.mode) cfg.sim_mode = *f.mode;
  if (!f.pair_file.empty()) cfg.pair_file = f.pair_file;
  cfg.validate();
  return cfg;
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::InvalidConfig, "cannot write " + path);
  os << content;
}

std::string dump(const json& j) { return dump_json(j) + "\n"; }

json envelope(const std::string& command, const RunConfig& cfg, json result) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", cfg.to_json()}, {"result", std::move(result)}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json stats_json(const PathStats& s) {
  return json{{"mean", s.mean}, {"std_error", s.std_error}, {"n_samples", s.n_samples}};
}

json report_json(const CompatibilityReport& r) {
  return json{
      {"verdict", to_string(r.verdict)},
      {"rho", r.rho},
      {"beta", r.beta},
      {"gap", r.gap},
      {"hjb_residual_sup", r.hjb_residual_sup},
      {"hjb_residual_abs_sup", r.hjb_residual_abs_sup},
      {"lyapunov_epsilon", optional_json(r.lyapunov_epsilon)},
      {"semigroup_slope", optional_json(r.semigroup_slope)},
      {"bounded_below_min", r.bounded_below_min},
      {"m_star_estimate", r.m_star_estimate},
      {"transient_selector", r.transient_selector},
      {"note", r.note},
  };
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

int expect_code(const Flags& f, const std::string& verdict, std::ostream& err) {
  if (f.expect.empty() || lower(verdict) == f.expect) return kOk;
  err << "expected " << f.expect << ", got " << lower(verdict) << "\n";
  return kExpectMismatch;
}

int cmd_pia(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(f);
  const DiffusionModel model = cfg.build_model();
  const Grid1D grid = cfg.grid();
  const Policy v0 = cfg.build_policy(cfg.initial_policy, model, grid);
  const PiaResult res = run_pia(model, grid, v0, cfg.pia_options());

  json compat;
  std::string verdict = to_string(Verdict::Undecided);
  try {
    const CompatibilityReport rep = check_compatible(model, grid, res.pair, cfg.verify_options());
    compat = report_json(rep);
    verdict = to_string(rep.verdict);
  } catch (const Error& e) {
    if (e.code() != Errc::RhoOutOfRange) throw;
    compat = json{{"verdict", verdict}, {"note", e.what()}};
  }
  json result{
      {"rho_final", res.pair.rho},
      {"iterations", res.trace.iterations},
      {"termination", to_string(res.trace.reason)},
      {"rho_trace", res.trace.rhos()},
      {"verdict", verdict},
      {"compatibility", compat},
  };
  emit(dump(envelope("pia", cfg, std::move(result))), f.out_path, out);

  if (!f.csv_path.empty()) {
    const Policy& v = res.trace.steps.back().policy;
    std::ostringstream os;
    os << "# rho=" << format_double(res.pair.rho) << "\n";
    os << "x,V,v\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << format_double(grid.x(i)) << ',' << format_double(res.pair.V.values[i]) << ',' << format_double(v[i]) << '\n';
    }
    emit(os.str(), f.csv_path, out);
  }
  return expect_code(f, verdict, err);
}

int cmd_sweep_rho(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load_config(f);
  std::ostringstream os;
  os << "rho,xi,beta_quad,beta_formula,gap,verdict\n";
  for (const analytic::SpuriousFamilyPoint& p : analytic::family_sweep(cfg.sweep_rhos(), cfg.quad_tol)) {
    const Verdict v = std::abs(p.gap) <= cfg.gap_tol ? Verdict::Compatible : Verdict::Spurious;
    os << format_double(p.rho) << ',' << format_double(p.xi) << ',' << format_double(p.beta_quad) << ','
       << format_double(p.beta_formula) << ',' << format_double(p.gap) << ',' << to_string(v) << '\n';
  }
  emit(os.str(), f.out_path, out);
  return kOk;
}

SolutionPair load_pair(const std::string& path, const Grid1D& grid) {
  if (path.empty()) throw Error(Errc::InvalidConfig, "a pair file is required (--pair-file or verify.pair_file)");
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open pair file " + path);
  return resample_pair(read_pair(in), grid);
}

int cmd_verify(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(f);
  const DiffusionModel model = cfg.build_model();
  const Grid1D grid = cfg.grid();
  const SolutionPair pair = load_pair(cfg.pair_file, grid);
  const CompatibilityReport rep = check_compatible(model, grid, pair, cfg.verify_options());
  json result = report_json(rep);
  emit(dump(envelope("verify", cfg, std::move(result))), f.out_path, out);
  return expect_code(f, to_string(rep.verdict), err);
}

int cmd_discount(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load_config(f);
  const VanishingDiscount vd = vanishing_discount_sweep(cfg.build_model(), cfg.grid(), cfg.alphas);
  std::ostringstream os;
  os << "alpha,F\n";
  for (std::size_t i = 0; i < vd.alphas.size(); ++i) os << format_double(vd.alphas[i]) << ',' << format_double(vd.F[i]) << '\n';
  os << "# extrapolated=" << format_double(vd.extrapolated) << '\n';
  emit(os.str(), f.out_path, out);
  return kOk;
}

int cmd_truncation(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load_config(f);
  const DiffusionModel model = cfg.build_model();
  const Grid1D grid = cfg.grid();
  const Policy frozen = cfg.build_policy(cfg.frozen_policy, model, grid);
  const double beta_frozen = evaluate_policy(model, frozen).rho;
  const auto pts = truncation_sweep(model, grid, frozen, cfg.radii, cfg.pia_options());
  std::ostringstream os;
  os << "# beta_frozen=" << format_double(beta_frozen) << '\n';
  os << "R,rho_R,iterations\n";
  for (const TruncationPoint& p : pts) os << format_double(p.radius) << ',' << format_double(p.rho_R) << ',' << p.iterations << '\n';
  emit(os.str(), f.out_path, out);
  return kOk;
}

double interpolate(const Grid1D& g, std::span<const double> v, double x) {
  const double s = (x + g.half_width()) / g.spacing();
  const double c = std::clamp(s, 0.0, static_cast<double>(g.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(c), g.size() - 2);
  const double t = c - static_cast<double>(i);
  return (1.0 - t) * v[i] + t * v[i + 1];
}

int cmd_simulate(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load_config(f);
  const DiffusionModel model = cfg.build_model();
  const Grid1D grid = cfg.grid();
  SimConfig sc = cfg.sim_config();
  json result{{"mode", cfg.sim_mode}};
  if (cfg.sim_mode == "average") {
    const Policy policy = cfg.build_policy(cfg.sim_policy, model, grid);
    result["stats"] = stats_json(simulate_average_cost(model, policy, sc));
  } else {
    sc.x0 = cfg.exit_x0;
    if (cfg.pair_file.empty()) {
      const Policy policy = cfg.build_policy(cfg.sim_policy, model, grid);
      const ExitEstimate e = estimate_exit_functional(model, policy, cfg.exit_x0, cfg.exit_radius, cfg.exit_rho, sc);
      result["psi"] = stats_json(e.psi);
      result["censored_fraction"] = e.censored_fraction;
    } else {
      const SolutionPair pair = load_pair(cfg.pair_file, grid);
      const Policy selector = improve(model, grid, pair.V.values);
      const ExitEstimate e = estimate_exit_functional(model, selector, cfg.exit_x0, cfg.exit_radius, pair.rho, sc,
                                                      std::span<const double>(pair.V.values));
      const double v_x0 = interpolate(grid, pair.V.values, cfg.exit_x0);
      result["rho"] = pair.rho;
      result["psi"] = stats_json(e.psi);
      result["v_exit"] = stats_json(*e.v_exit);
      result["combined"] = stats_json(*e.combined);
      result["v_at_x0"] = v_x0;
      result["difference"] = e.combined->mean - v_x0;
      result["censored_fraction"] = e.censored_fraction;
    }
  }
  emit(dump(envelope("simulate", cfg, std::move(result))), f.out_path, out);
  return kOk;
}

int cmd_models_list(std::ostream& out) {
  for (const BuiltinModelInfo& m : list_builtin_models()) out << m.name << ": " << m.description << '\n';
  return kOk;
}

int cmd_export_pair(const Flags& f, std::ostream& out) {
  const RunConfig cfg = load_config(f);
  if (!f.rho) throw Error(Errc::InvalidConfig, "export-pair needs --rho");
  const DiffusionModel model = cfg.build_model();
  const Grid1D grid = cfg.grid();
  if (f.source != "grid" && f.source != "quadrature") {
    throw Error(Errc::InvalidConfig, "--source must be grid or quadrature");
  }
  const SolutionPair pair{f.source == "grid" ? analytic::grid_v_rho(model, grid, *f.rho)
                                             : ValueFunction{grid, analytic::sample_v_rho(grid, *f.rho, cfg.quad_tol), true},
                          *f.rho};
  std::ostringstream os;
  write_pair(os, pair);
  emit(os.str(), f.out_path, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for ergodic control HJB solution pairs", "ergocheck"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON run configuration");
    sub->add_option("--out", f.out_path, "output file (default stdout)");
  };
  auto grid_opts = [&f](CLI::App* sub) {
    sub->add_option("--L", f.L, "grid half-width");
    sub->add_option("--N", f.N, "grid node count (odd)");
  };

  CLI::App* pia = app.add_subcommand("pia", "policy iteration and compatibility check of the terminal pair");
  common(pia);
  grid_opts(pia);
  pia->add_option("--max-iter", f.max_iter, "iteration cap");
  pia->add_option("--tol", f.tol, "stop when |rho_k+1 - rho_k| <= tol");
  pia->add_option("--initial-rho", f.initial_rho, "start from the selector w_rho");
  pia->add_option("--csv", f.csv_path, "write x,V,v of the terminal pair");
  pia->add_option("--expect", f.expect, "exit 3 unless the verdict matches")->check(CLI::IsMember({"compatible", "spurious"}));

  CLI::App* sweep = app.add_subcommand("sweep-rho", "beta(w_rho) against rho over the example family");
  common(sweep);
  sweep->add_option("--rho-range", f.rho_range, "start:stop:step or a comma list");
  sweep->add_option("--gap-tol", f.gap_tol, "gap below which a point is compatible");

  CLI::App* verify = app.add_subcommand("verify", "compatibility report for a (V, rho) pair file");
  common(verify);
  grid_opts(verify);
  verify->add_option("--pair-file", f.pair_file, "pair CSV");
  verify->add_option("--gap-tol", f.gap_tol, "gap tolerance");
  verify->add_option("--expect", f.expect, "exit 3 unless the verdict matches")->check(CLI::IsMember({"compatible", "spurious"}));

  CLI::App* discount = app.add_subcommand("discount", "vanishing-discount sweep of alpha V_alpha(0)");
  common(discount);
  grid_opts(discount);
  discount->add_option("--alphas", f.alphas, "strictly descending comma list");

  CLI::App* trunc = app.add_subcommand("truncation", "optimal cost with controls frozen outside radius R");
  common(trunc);
  grid_opts(trunc);
  trunc->add_option("--radii", f.radii, "comma list of radii");
  trunc->add_option("--frozen-rho", f.frozen_rho, "freeze to the selector w_rho");
  trunc->add_option("--tol", f.tol, "policy iteration tolerance");

  CLI::App* sim = app.add_subcommand("simulate", "Euler-Maruyama estimates of average cost or exit functionals");
  common(sim);
  grid_opts(sim);
  sim->add_option("--seed", f.seed, "base seed");
  sim->add_option("--T", f.T, "horizon");
  sim->add_option("--dt", f.dt, "time step");
  sim->add_option("--paths", f.paths, "number of paths");
  sim->add_option("--mode", f.mode, "average or exit")->check(CLI::IsMember({"average", "exit"}));
  sim->add_option("--x0", f.x0, "exit mode start point");
  sim->add_option("--pair-file", f.pair_file, "exit mode: pair whose selector drives the paths");

  CLI::App* models = app.add_subcommand("models", "built-in models");
  models->require_subcommand(1);
  CLI::App* models_list = models->add_subcommand("list", "list built-in models");

  CLI::App* exp = app.add_subcommand("export-pair", "write the grid or quadrature V_rho of the example as a pair file");
  common(exp);
  grid_opts(exp);
  exp->add_option("--rho", f.rho, "family index in [1/3, 1)")->required();
  exp->add_option("--source", f.source, "grid or quadrature")->check(CLI::IsMember({"grid", "quadrature"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Prints help or the parse error and reports 0 only for --help.
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  try {
    if (pia->parsed()) return cmd_pia(f, out, err);
    if (sweep->parsed()) return cmd_sweep_rho(f, out);
    if (verify->parsed()) return cmd_verify(f, out, err);
    if (discount->parsed()) return cmd_discount(f, out);
    if (trunc->parsed()) return cmd_truncation(f, out);
    if (sim->parsed()) return cmd_simulate(f, out);
    if (models_list->parsed()) return cmd_models_list(out);
    if (exp->parsed()) return cmd_export_pair(f, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kConfigError : kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kConfigError;
}

}  // namespace ergocheck::cli
