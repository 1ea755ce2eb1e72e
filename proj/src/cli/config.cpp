// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "ergocheck/analytic.hpp"
#include "ergocheck/cli/expression.hpp"
#include "ergocheck/error.hpp"

namespace ergocheck::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(Errc::InvalidConfig, msg); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) bad("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("field " + where + "." + key + " has the wrong type");
  }
}

void read_size(const json& j, const char* key, std::size_t& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) bad("field " + where + "." + key + " must be a nonnegative integer");
  out = v.get<std::size_t>();
}

PolicySpec read_policy(const json& j, const std::string& where, PolicySpec spec) {
  check_keys(j, where, {"kind", "rho", "value", "expr"});
  read(j, "kind", spec.kind, where);
  read(j, "rho", spec.rho, where);
  read(j, "value", spec.value, where);
  read(j, "expr", spec.expr, where);
  if (spec.kind != "w_rho" && spec.kind != "constant" && spec.kind != "feedback") {
    bad(where + ".kind must be w_rho, constant or feedback");
  }
  if (spec.kind == "feedback" && spec.expr.empty()) bad(where + ".expr is required for feedback policies");
  return spec;
}

json policy_json(const PolicySpec& p) {
  json j{{"kind", p.kind}};
  if (p.kind == "w_rho") j["rho"] = p.rho;
  if (p.kind == "constant") j["value"] = p.value;
  if (p.kind == "feedback") j["expr"] = p.expr;
  return j;
}

double parse_scalar(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw Error(Errc::ParseError, "empty number");
  double v = 0.0;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) throw Error(Errc::ParseError, "malformed number '" + s + "'");
  return v;
}

// A plain number or a fraction a/b, so that 1/3 can be written exactly.
double parse_number(const std::string& s) {
  const std::size_t slash = s.find('/');
  if (slash == std::string::npos) return parse_scalar(s);
  const double den = parse_scalar(s.substr(slash + 1));
  if (den == 0.0) throw Error(Errc::ParseError, "zero denominator in '" + s + "'");
  return parse_scalar(s.substr(0, slash)) / den;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw Error(Errc::ParseError, "empty list");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw Error(Errc::ParseError, "range must be start:stop:step, got '" + text + "'");
  const double a = parse_number(parts[0]);
  const double b = parse_number(parts[1]);
  const double step = parse_number(parts[2]);
  if (!(step > 0.0) || b < a) throw Error(Errc::ParseError, "range needs step > 0 and stop >= start: '" + text + "'");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  if (n > 100000) throw Error(Errc::ParseError, "range has too many points: '" + text + "'");
  std::vector<double> out(n);
  // Snap to 1e-12 so that 0.4 + 4 * 0.05 prints as 0.6.
  for (std::size_t i = 0; i < n; ++i) out[i] = std::round((a + step * static_cast<double>(i)) * 1e12) / 1e12;
  return out;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"model", "grid", "controls", "tolerances", "pia", "sweep_rho", "discount", "truncation", "verify", "sim",
              "simulate"});
  if (j.contains("model")) {
    const json& m = j.at("model");
    if (m.is_string()) {
      c.model.name = m.get<std::string>();
    } else {
      check_keys(m, "model", {"name", "drift", "dispersion", "cost"});
      read(m, "name", c.model.name, "model");
      std::string d, s, k;
      read(m, "drift", d, "model");
      read(m, "dispersion", s, "model");
      read(m, "cost", k, "model");
      if (d.empty() || k.empty()) bad("inline models need drift and cost expressions");
      c.model.drift = d;
      c.model.cost = k;
      c.model.dispersion = s.empty() ? "1" : s;
      if (!m.contains("name")) c.model.name = "inline";
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"L", "N"});
    read(g, "L", c.L, "grid");
    read_size(g, "N", c.N, "grid");
  }
  read(j, "controls", c.controls, "config");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, "tolerances", {"pia_tol", "gap_tol", "residual_tol", "quad_tol"});
    read(t, "pia_tol", c.pia_tol, "tolerances");
    read(t, "gap_tol", c.gap_tol, "tolerances");
    read(t, "residual_tol", c.residual_tol, "tolerances");
    read(t, "quad_tol", c.quad_tol, "tolerances");
  }
  if (j.contains("pia")) {
    const json& p = j.at("pia");
    check_keys(p, "pia", {"max_iter", "initial_policy"});
    read_size(p, "max_iter", c.max_iter, "pia");
    if (p.contains("initial_policy")) c.initial_policy = read_policy(p.at("initial_policy"), "pia.initial_policy", c.initial_policy);
  }
  if (j.contains("sweep_rho")) {
    const json& s = j.at("sweep_rho");
    check_keys(s, "sweep_rho", {"rhos", "range"});
    read(s, "rhos", c.rhos, "sweep_rho");
    if (s.contains("range")) {
      try {
        c.rhos = parse_range(s.at("range").get<std::string>());
      } catch (const Error& e) {
        bad(std::string("sweep_rho.range: ") + e.what());
      } catch (const json::exception&) {
        bad("sweep_rho.range must be a string");
      }
    }
  }
  if (j.contains("discount")) {
    const json& d = j.at("discount");
    check_keys(d, "discount", {"alphas"});
    read(d, "alphas", c.alphas, "discount");
  }
  if (j.contains("truncation")) {
    const json& t = j.at("truncation");
    check_keys(t, "truncation", {"radii", "frozen_policy"});
    read(t, "radii", c.radii, "truncation");
    if (t.contains("frozen_policy")) c.frozen_policy = read_policy(t.at("frozen_policy"), "truncation.frozen_policy", c.frozen_policy);
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, "verify", {"semigroup_horizon", "semigroup_steps", "lyapunov_radius", "pair_file"});
    read(v, "semigroup_horizon", c.semigroup_horizon, "verify");
    read_size(v, "semigroup_steps", c.semigroup_steps, "verify");
    read(v, "lyapunov_radius", c.lyapunov_radius, "verify");
    read(v, "pair_file", c.pair_file, "verify");
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s, "sim", {"dt", "T", "n_paths", "seed", "x0", "reflect"});
    read(s, "dt", c.sim.dt, "sim");
    read(s, "T", c.sim.T, "sim");
    read_size(s, "n_paths", c.sim.n_paths, "sim");
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) bad("sim.seed must be a nonnegative integer");
      c.sim.seed = s.at("seed").get<std::uint64_t>();
    }
    read(s, "x0", c.sim.x0, "sim");
    read(s, "reflect", c.reflect, "sim");
  }
  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    check_keys(s, "simulate", {"mode", "policy", "x0", "r", "rho"});
    read(s, "mode", c.sim_mode, "simulate");
    if (s.contains("policy")) c.sim_policy = read_policy(s.at("policy"), "simulate.policy", c.sim_policy);
    read(s, "x0", c.exit_x0, "simulate");
    read(s, "r", c.exit_radius, "simulate");
    read(s, "rho", c.exit_rho, "simulate");
  }
  c.validate();
  return c;
}

json RunConfig::to_json() const {
  json m;
  if (model.is_inline()) {
    m = json{{"name", model.name}, {"drift", *model.drift}, {"dispersion", *model.dispersion}, {"cost", *model.cost}};
  } else {
    m = model.name;
  }
  return json{
      {"model", m},
      {"grid", {{"L", L}, {"N", N}}},
      {"controls", controls},
      {"tolerances", {{"pia_tol", pia_tol}, {"gap_tol", gap_tol}, {"residual_tol", residual_tol}, {"quad_tol", quad_tol}}},
      {"pia", {{"max_iter", max_iter}, {"initial_policy", policy_json(initial_policy)}}},
      {"sweep_rho", {{"rhos", sweep_rhos()}}},
      {"discount", {{"alphas", alphas}}},
      {"truncation", {{"radii", radii}, {"frozen_policy", policy_json(frozen_policy)}}},
      {"verify",
       {{"semigroup_horizon", semigroup_horizon},
        {"semigroup_steps", semigroup_steps},
        {"lyapunov_radius", lyapunov_radius},
        {"pair_file", pair_file}}},
      {"sim", {{"dt", sim.dt}, {"T", sim.T}, {"n_paths", sim.n_paths}, {"seed", sim.seed}, {"x0", sim.x0}, {"reflect", reflect}}},
      {"simulate",
       {{"mode", sim_mode}, {"policy", policy_json(sim_policy)}, {"x0", exit_x0}, {"r", exit_radius}, {"rho", exit_rho}}},
  };
}

void RunConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) bad("grid.L must be positive");
  if (N < 3 || N % 2 == 0) bad("grid.N must be odd and at least 3");
  if (controls.empty()) bad("controls must be non-empty");
  for (double t : {pia_tol, gap_tol, residual_tol, quad_tol}) {
    if (!(t > 0.0)) bad("tolerances must be positive");
  }
  if (max_iter == 0) bad("pia.max_iter must be at least 1");
  for (double a : alphas) {
    if (!(a > 0.0)) bad("discount.alphas must be positive");
  }
  for (double r : radii) {
    if (!(r >= 0.0)) bad("truncation.radii must be nonnegative");
  }
  if (!(semigroup_horizon > 0.0) || semigroup_steps == 0) bad("verify semigroup horizon and steps must be positive");
  if (!(lyapunov_radius >= 0.0)) bad("verify.lyapunov_radius must be nonnegative");
  try {
    sim_config().validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (sim_mode != "average" && sim_mode != "exit") bad("simulate.mode must be average or exit");
  if (!(exit_radius > 0.0)) bad("simulate.r must be positive");
  try {
    control_set();
    (void)build_model();
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    bad(e.what());
  }
}

Grid1D RunConfig::grid() const { return build_grid(L, N); }

ControlSet RunConfig::control_set() const { return ControlSet(controls); }

DiffusionModel RunConfig::build_model() const {
  const ControlSet cs = control_set();
  if (!model.is_inline()) return builtin_model(model.name, &cs);
  Expression b = Expression::parse(*model.drift);
  Expression s = Expression::parse(*model.dispersion);
  Expression c = Expression::parse(*model.cost);
  if (s.uses_u()) bad("dispersion must not depend on u");
  return DiffusionModel{
      model.name,
      [b](double x, double u) { return b(x, u); },
      [s](double x) { return s(x); },
      [c](double x, double u) { return c(x, u); },
      cs,
  };
}

Policy RunConfig::build_policy(const PolicySpec& spec, const DiffusionModel& m, const Grid1D& g) const {
  if (spec.kind == "w_rho") return analytic::w_rho_policy(g, m.controls, spec.rho);
  if (spec.kind == "constant") {
    if (!m.controls.contains(spec.value)) bad("constant policy value is not in the control set");
    return Policy::constant(g, spec.value);
  }
  Expression f = Expression::parse(spec.expr);
  return Policy::from_feedback(g, m.controls, [f](double x) { return f(x, 0.0); });
}

PiaOptions RunConfig::pia_options() const { return PiaOptions{pia_tol, max_iter, TieBreak::Smallest}; }

VerifyOptions RunConfig::verify_options() const {
  VerifyOptions o;
  o.gap_tol = gap_tol;
  o.residual_tol = residual_tol;
  o.semigroup_horizon = semigroup_horizon;
  o.semigroup_steps = semigroup_steps;
  o.lyapunov_radius = lyapunov_radius;
  return o;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s = sim;
  if (reflect) s.reflect_at = L;
  return s;
}

std::vector<double> RunConfig::sweep_rhos() const {
  if (!rhos.empty()) return rhos;
  return parse_range("0.40:0.90:0.05");
}

}  // namespace ergocheck::cli
