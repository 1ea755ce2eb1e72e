// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ergocheck/analytic.hpp"
#include "ergocheck/cli/commands.hpp"
#include "ergocheck/discretize.hpp"
#include "ergocheck/sde.hpp"
#include "ergocheck/solvers.hpp"
#include "ergocheck/valuedet.hpp"
#include "ergocheck/verify.hpp"
#include "oracles.hpp"

using namespace ergocheck;
namespace an = ergocheck::analytic;

namespace {

// Tolerances.
constexpr double kRhoTol = 1e-2;
constexpr std::size_t kMaxPiaIter = 25;
constexpr double kPiaSeconds = 10.0;
constexpr double kGapMargin = 0.01;
constexpr double kBetaStarTol = 1e-6;
constexpr double kDescentSlack = 1e-10;
constexpr double kDiscountSlack = 1e-8;
constexpr double kDiscountLastTol = 0.05;
constexpr double kExtrapolationTol = 2e-2;
constexpr double kTruncationCap = 0.46;
constexpr double kSlopeFlat = 5e-3;
constexpr double kSlopeRel = 0.1;
constexpr double kBetaAgreeFloor = 1e-2;
constexpr double kMcSeconds = 60.0;
constexpr double kStderrs = 3.0;
constexpr double kHjbTol = 1e-6;
constexpr double kDensityTol = 5e-3;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Grid1D& grid() {
  static const Grid1D g = build_grid(8.0, 4001);
  return g;
}

const DiffusionModel& model() {
  static const DiffusionModel m = builtin_example();
  return m;
}

struct Invocation {
  int code;
  std::string out;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

void optimal_value() {
  const auto t0 = std::chrono::steady_clock::now();
  const PiaResult r = run_pia(model(), grid(), an::w_rho_policy(grid(), model().controls, 0.8), PiaOptions{1e-9, 50});
  const double secs = seconds_since(t0);
  const bool ok = r.trace.iterations <= kMaxPiaIter && std::abs(r.pair.rho - 1.0 / 3.0) <= kRhoTol &&
                  secs <= kPiaSeconds && r.trace.reason != Termination::MaxIterations;
  report(1, ok, fmt("iterations=%zu rho=%.10f time=%.2fs", r.trace.iterations, r.pair.rho, secs));
}

void spurious_family() {
  const Invocation s = invoke({"sweep-rho", "--rho-range", "0.40:0.90:0.05"});
  bool ok = s.code == cli::kOk;
  std::size_t rows = 0;
  double worst = -1e300;
  std::istringstream lines(s.out);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) {
      ok = false;
      continue;
    }
    const double rho = std::stod(f[0]), beta = std::stod(f[2]);
    worst = std::max(worst, beta - (rho - kGapMargin));
    ok = ok && beta < rho - kGapMargin && f[5] == "Spurious";
    ++rows;
  }
  ok = ok && rows == 11;

  const double b13 = an::beta_quad(1.0 / 3.0);
  const Invocation c = invoke({"sweep-rho", "--rho-range", "1/3"});
  const bool compat = c.code == cli::kOk && c.out.find(",Compatible") != std::string::npos;
  ok = ok && std::abs(b13 - 1.0 / 3.0) <= kBetaStarTol && compat;
  report(2, ok, fmt("rows=%zu max(beta-rho+0.01)=%.4g beta(1/3)-1/3=%.3g verdict(1/3)=%s", rows, worst,
                    b13 - 1.0 / 3.0, compat ? "Compatible" : "other"));
}

void monotone_descent() {
  std::vector<Policy> starts;
  for (double rho : {0.4, 0.6, 0.8, 0.95}) starts.push_back(an::w_rho_policy(grid(), model().controls, rho));
  starts.push_back(Policy::from_feedback(grid(), model().controls, [](double x) { return x > 2.0 ? -1.0 : 1.0; }));
  double worst = -1e300;
  std::size_t traces = 0;
  for (const Policy& p : starts) {
    for (TieBreak tie : {TieBreak::Smallest, TieBreak::Largest}) {
      const auto rhos = run_pia(model(), grid(), p, PiaOptions{1e-12, 50, tie}).trace.rhos();
      for (std::size_t k = 1; k < rhos.size(); ++k) worst = std::max(worst, rhos[k] - rhos[k - 1]);
      ++traces;
    }
  }
  report(3, worst <= kDescentSlack, fmt("traces=%zu max(rho_k+1 - rho_k)=%.3g", traces, worst));
}

void vanishing_discount() {
  const std::vector<double> alphas{0.5, 0.1, 0.02, 0.004};
  const VanishingDiscount s = vanishing_discount_sweep(model(), grid(), alphas);
  // Along shrinking alpha, F must not drop: F is non-increasing in alpha.
  bool monotone = true;
  for (std::size_t i = 1; i < s.F.size(); ++i) monotone = monotone && s.F[i] >= s.F[i - 1] - kDiscountSlack;
  const double last = s.F.back();
  const bool ok = monotone && std::abs(last - 1.0 / 3.0) <= kDiscountLastTol &&
                  std::abs(s.extrapolated - 1.0 / 3.0) <= kExtrapolationTol;
  report(4, ok, fmt("F=[%.5f %.5f %.5f %.5f] extrapolated=%.5f", s.F[0], s.F[1], s.F[2], s.F[3], s.extrapolated));
}

void truncation() {
  const std::vector<double> radii{1.0, 2.0, 4.0};
  const auto opt = truncation_sweep(model(), grid(), an::w_rho_policy(grid(), model().controls, 1.0 / 3.0), radii);
  const auto spur = truncation_sweep(model(), grid(), an::w_rho_policy(grid(), model().controls, 0.6), radii);
  bool ok = true;
  std::string detail = "w_1/3:";
  for (const auto& p : opt) {
    ok = ok && std::abs(p.rho_R - 1.0 / 3.0) <= kRhoTol;
    detail += fmt(" %.5f", p.rho_R);
  }
  detail += " w_0.6:";
  for (const auto& p : spur) {
    ok = ok && p.rho_R <= kTruncationCap;
    detail += fmt(" %.5f", p.rho_R);
  }
  report(5, ok, detail);
}

void semigroup(const PiaResult& pia) {
  const Policy w13 = an::w_rho_policy(grid(), model().controls, 1.0 / 3.0);
  const double flat = semigroup_drift_test(model(), grid(), w13, pia.pair.V.values, 50.0, 500).slope;
  const Policy w06 = an::w_rho_policy(grid(), model().controls, 0.6);
  const ValueFunction V06 = an::grid_v_rho(model(), grid(), 0.6);
  const double slope = semigroup_drift_test(model(), grid(), w06, V06.values, 50.0, 500).slope;
  const double expected = 0.6 - an::beta_quad(0.6);
  const bool ok = std::abs(flat) <= kSlopeFlat && std::abs(slope - expected) <= kSlopeRel * std::abs(expected);
  report(6, ok, fmt("compatible slope=%.3g spurious slope=%.5f expected=%.5f", flat, slope, expected));
}

void three_way_beta() {
  const Policy w13 = an::w_rho_policy(grid(), model().controls, 1.0 / 3.0);
  const double quad = an::beta_quad(1.0 / 3.0);
  const double on_grid =
      average_cost(cost_vector(model(), w13), invariant_density(assemble_policy_generator(model(), grid(), w13), grid()));
  SimConfig c;
  c.T = 500.0;
  c.dt = 1e-2;
  c.n_paths = 400;
  const auto t0 = std::chrono::steady_clock::now();
  const PathStats mc = simulate_average_cost(model(), w13, c);
  const double secs = seconds_since(t0);
  const double tol = std::max(kBetaAgreeFloor, kStderrs * mc.std_error);
  const bool ok = std::abs(quad - on_grid) <= tol && std::abs(quad - mc.mean) <= tol &&
                  std::abs(on_grid - mc.mean) <= tol && secs <= kMcSeconds;
  report(7, ok, fmt("quad=%.6f grid=%.6f mc=%.6f se=%.2g tol=%.3g mc_time=%.1fs", quad, on_grid, mc.mean, mc.std_error,
                    tol, secs));
}

void representation(const PiaResult& pia) {
  const Policy sel = improve(model(), grid(), pia.pair.V.values);
  SimConfig c;
  c.dt = 1e-3;
  c.T = 100.0;
  c.n_paths = 4000;
  const ExitEstimate e = estimate_exit_functional(model(), sel, 2.0, 1.0, pia.pair.rho, c,
                                                  std::span<const double>(pia.pair.V.values));
  const double v2 = pia.pair.V.values[grid().nearest_index(2.0)];
  const bool ok = e.combined.has_value() && std::abs(e.combined->mean - v2) <= kStderrs * e.combined->std_error;
  report(8, ok,
         e.combined ? fmt("psi+E[V]=%.5f V(2)=%.5f se=%.2g censored=%.3g", e.combined->mean, v2, e.combined->std_error,
                          e.censored_fraction)
                    : std::string("no combined estimate"));
}

void continuum_hjb() {
  const double h = 1e-4;
  double worst = 0.0;
  for (double rho : {1.0 / 3.0, 0.5, 0.8}) {
    for (double x : {-3.0, -1.0, 0.5, 2.0}) {
      const double hp = (x + h) - x, hm = x - (x - h);
      const double up = an::v_rho_increment(rho, x, x + h);
      const double down = an::v_rho_increment(rho, x - h, x);
      const double d2 = 2.0 * (up / hp - down / hm) / (hp + hm);
      const double d1 = (up + down) / (hp + hm);
      worst = std::max(worst, std::abs(0.5 * d2 - std::abs(d1) + oracle::cost(x) - rho));
    }
  }
  report(9, worst <= kHjbTol, fmt("max residual=%.3g", worst));
}

void densities() {
  const Policy w13 = an::w_rho_policy(grid(), model().controls, 1.0 / 3.0);
  const InvariantDensity d = invariant_density(assemble_policy_generator(model(), grid(), w13), grid());
  double err = 0.0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    err = std::max(err, std::abs(d.psi[i] - std::exp(-2.0 * std::abs(grid().x(i)))));
  }
  const DiffusionModel ou = ou_model();
  const Policy zero = Policy::constant(grid(), 0.0);
  const InvariantDensity g = invariant_density(assemble_policy_generator(ou, grid(), zero), grid());
  double ou_err = 0.0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    const double x = grid().x(i);
    ou_err = std::max(ou_err, std::abs(g.psi[i] - std::exp(-x * x) / std::sqrt(M_PI)));
  }
  report(10, err <= kDensityTol && ou_err <= kDensityTol, fmt("example sup=%.3g ou sup=%.3g", err, ou_err));
}

void reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ergocheck_acceptance";
  fs::create_directories(dir);
  const std::vector<std::vector<std::string>> commands{
      {"pia"},
      {"sweep-rho"},
      {"verify", "--pair-file", (dir / "pair.csv").string()},
      {"simulate", "--T", "50", "--paths", "16"},
  };
  bool ok = invoke({"export-pair", "--rho", "0.6", "--out", (dir / "pair.csv").string()}).code == cli::kOk;
  std::size_t compared = 0;
  for (const auto& cmd : commands) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / ("run" + std::to_string(run) + ".out");
      auto args = cmd;
      args.insert(args.end(), {"--out", out.string()});
      ok = ok && invoke(args).code == cli::kOk;
      std::ifstream in(out, std::ios::binary);
      const std::string bytes(std::istreambuf_iterator<char>(in), {});
      ok = ok && !bytes.empty();
      if (run == 0) {
        first = bytes;
      } else {
        ok = ok && bytes == first;
      }
    }
    ++compared;
  }
  fs::remove_all(dir);
  report(11, ok, fmt("commands compared=%zu", compared));
}

}  // namespace

int main() {
  const PiaResult pia = run_pia(model(), grid(), an::w_rho_policy(grid(), model().controls, 0.8));
  const auto guard = [](int id, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, optimal_value);
  guard(2, spurious_family);
  guard(3, monotone_descent);
  guard(4, vanishing_discount);
  guard(5, truncation);
  guard(6, [&] { semigroup(pia); });
  guard(7, three_way_beta);
  guard(8, [&] { representation(pia); });
  guard(9, continuum_hjb);
  guard(10, densities);
  guard(11, reproducibility);
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
