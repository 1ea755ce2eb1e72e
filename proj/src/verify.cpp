// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ergocheck/discretize.hpp"
#include "ergocheck/error.hpp"
#include "ergocheck/valuedet.hpp"

namespace ergocheck {

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Compatible: return "Compatible";
    case Verdict::Spurious: return "Spurious";
    case Verdict::Undecided: return "Undecided";
  }
  return "Unknown";
}

HjbResidual hjb_residual(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair) {
  const std::size_t n = grid.size();
  const std::span<const double> V = pair.V.values;
  if (V.size() != n) throw Error(Errc::PolicyLengthMismatch, "value function does not match the grid");
  const ControlTables tables = ControlTables::build(model, grid);
  const double h = grid.spacing();

  HjbResidual out{std::vector<double>(n, 0.0), 0.0, 0.0};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    double drift_scale = 0.0;
    const double x = grid.x(i);
    const double dv = (V[i + 1] - V[i - 1]) / (2.0 * h);
    for (std::size_t k = 0; k < tables.controls.size(); ++k) {
      best = std::min(best, tables.hamiltonian_term(k, i, V));
      drift_scale = std::max(drift_scale, std::abs(model.drift(x, tables.controls[k]) * dv));
    }
    const double r = best - pair.rho;
    const double d2 = (V[i + 1] - 2.0 * V[i] + V[i - 1]) / (h * h);
    const double scale = 1.0 + std::abs(model.diffusion(x) * d2) + drift_scale;
    out.residual[i] = r;
    out.sup = std::max(out.sup, std::abs(r));
    out.scaled_sup = std::max(out.scaled_sup, std::abs(r) / scale);
  }
  return out;
}

SemigroupResult semigroup_drift_test(const DiffusionModel& model, const Grid1D& grid, const Policy& policy,
                                     std::span<const double> V, double horizon, std::size_t steps,
                                     std::optional<std::vector<double>> initial) {
  const std::size_t n = grid.size();
  if (V.size() != n) throw Error(Errc::PolicyLengthMismatch, "value function does not match the grid");
  if (!(horizon > 0.0) || steps < 4) throw Error(Errc::InvalidArgument, "semigroup test needs T > 0 and >= 4 steps");

  const BandedOperator A = assemble_policy_generator(model, grid, policy);
  const BandedOperator At = A.transpose();
  std::vector<double> AV = A.apply(V);
  AV.front() = 0.0;
  AV.back() = 0.0;

  std::vector<double> p;
  if (initial) {
    if (initial->size() != n) throw Error(Errc::InvalidArgument, "initial law does not match the grid");
    p = *initial;
  } else {
    p.assign(n, 0.0);
    p[grid.origin_index()] = 1.0;
  }
  auto dot = [n](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  };

  const double dt = horizon / static_cast<double>(steps);
  SemigroupResult out;
  out.times.reserve(steps + 1);
  double m = dot(p, V);
  out.times.push_back(0.0);
  out.drift_path.push_back(m);
  out.mean_path.push_back(m);
  std::vector<double> rhs(n);
  for (std::size_t s = 1; s <= steps; ++s) {
    // (I/dt - A^T) p_{n+1} = p_n / dt
    for (std::size_t i = 0; i < n; ++i) rhs[i] = p[i] / dt;
    p = solve_banded(At, 1.0 / dt, rhs);
    m += dt * dot(p, AV);
    out.times.push_back(dt * static_cast<double>(s));
    out.drift_path.push_back(m);
    out.mean_path.push_back(dot(p, V));
  }

  // Least-squares slope over [T/2, T].
  double st = 0.0, sm = 0.0, stt = 0.0, stm = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < out.times.size(); ++s) {
    if (out.times[s] < 0.5 * horizon) continue;
    const double t = out.times[s];
    st += t;
    sm += out.drift_path[s];
    stt += t * t;
    stm += t * out.drift_path[s];
    ++count;
  }
  const double c = static_cast<double>(count);
  out.slope = (c * stm - st * sm) / (c * stt - st * st);
  return out;
}

LyapunovResult foster_lyapunov_check(const DiffusionModel& model, const Grid1D& grid, const Policy& policy,
                                     std::span<const double> lyapunov, double r_domain) {
  if (lyapunov.size() != grid.size()) throw Error(Errc::PolicyLengthMismatch, "Lyapunov function does not match the grid");
  const BandedOperator A = assemble_policy_generator(model, grid, policy);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(std::abs(grid.x(i)) > r_domain)) continue;
    const double val = A.apply_row(i, lyapunov);
    if (val > worst) {
      worst = val;
      worst_x = grid.x(i);
    }
  }
  if (worst == -std::numeric_limits<double>::infinity()) {
    throw Error(Errc::InvalidRadius, "no grid nodes outside the Lyapunov domain");
  }
  return LyapunovResult{-worst > 0.0, -worst, worst_x};
}

CompatibilityReport check_compatible(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair,
                                     const VerifyOptions& opts) {
  const double m_star = m_star_estimate(model, grid);
  if (!(pair.rho < m_star)) {
    throw Error(Errc::RhoOutOfRange, "rho = " + std::to_string(pair.rho) + " is not below the M* estimate " +
                                         std::to_string(m_star));
  }
  if (!(pair.V.grid == grid)) throw Error(Errc::PolicyLengthMismatch, "pair lives on a different grid");

  const ControlTables tables = ControlTables::build(model, grid);
  Policy selector = improve(tables, pair.V.values, opts.tie_break);
  const HjbResidual res = hjb_residual(model, grid, pair);

  CompatibilityReport rep{selector,
                          std::numeric_limits<double>::quiet_NaN(),
                          pair.rho,
                          std::numeric_limits<double>::quiet_NaN(),
                          Verdict::Undecided,
                          res.scaled_sup,
                          res.sup,
                          std::nullopt,
                          std::nullopt,
                          *std::min_element(pair.V.values.begin(), pair.V.values.end()),
                          m_star,
                          false,
                          {}};

  const BandedOperator A = assemble_policy_generator(model, grid, selector);
  try {
    const InvariantDensity density = invariant_density(A, grid);
    rep.beta = average_cost(cost_vector(model, selector), density);
  } catch (const Error& e) {
    if (e.code() != Errc::TransienceDetected) throw;
    rep.transient_selector = true;
    rep.note = e.what();
    return rep;
  }
  rep.gap = std::abs(rep.beta - pair.rho);

  const bool residual_ok = rep.hjb_residual_sup <= opts.residual_tol;
  if (residual_ok && rep.gap <= opts.gap_tol) {
    rep.verdict = Verdict::Compatible;
  } else if (residual_ok) {
    rep.verdict = Verdict::Spurious;
  } else {
    rep.verdict = Verdict::Undecided;
    rep.note = "pair does not solve the HJB on the grid";
  }

  rep.semigroup_slope = semigroup_drift_test(model, grid, selector, pair.V.values, opts.semigroup_horizon,
                                             opts.semigroup_steps)
                            .slope;
  const LyapunovResult lyap = foster_lyapunov_check(model, grid, selector, pair.V.values, opts.lyapunov_radius);
  if (lyap.success) rep.lyapunov_epsilon = lyap.epsilon;
  return rep;
}

}  // namespace ergocheck
