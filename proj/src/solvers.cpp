// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergocheck/discretize.hpp"
#include "ergocheck/error.hpp"

namespace ergocheck {

namespace {

constexpr double kNonMonotoneSlack = 1e-8;

// Two Hamiltonian terms closer than this, relative to the size of the
// products that make them up, count as a tie.
constexpr double kTieRel = 1e-12;

bool better(double candidate, double best, TieBreak tie, double scale) {
  const double eps = kTieRel * std::max({1.0, std::abs(candidate), std::abs(best), scale});
  if (tie == TieBreak::Smallest) return candidate < best - eps;
  return candidate <= best + eps;
}

// Largest magnitude of the products summed in any Hamiltonian term at node i.
double term_scale(const ControlTables& t, std::size_t i, std::span<const double> V) {
  const std::size_t n = V.size();
  double s = 0.0;
  for (std::size_t k = 0; k < t.controls.size(); ++k) {
    const BandedOperator& A = t.generators[k];
    double m = std::abs(A.diag[i] * V[i]) + std::abs(t.costs[k][i]);
    if (i > 0) m += std::abs(A.sub[i] * V[i - 1]);
    if (i + 1 < n) m += std::abs(A.super[i] * V[i + 1]);
    s = std::max(s, m);
  }
  return s;
}

}  // namespace

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::PolicyFixedPoint: return "policy_fixed_point";
    case Termination::RhoStalled: return "rho_stalled";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

std::vector<double> PiaTrace::rhos() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.rho);
  return out;
}

ControlTables ControlTables::build(const DiffusionModel& model, const Grid1D& grid) {
  ControlTables t{grid, std::vector<double>(model.controls.values().begin(), model.controls.values().end()),
                  assemble_control_generators(model, grid), {}};
  t.costs.reserve(t.controls.size());
  for (double u : t.controls) t.costs.push_back(cost_vector(model, Policy::constant(grid, u)));
  return t;
}

Policy improve(const ControlTables& tables, std::span<const double> V, TieBreak tie) {
  const std::size_t n = tables.grid.size();
  if (V.size() != n) throw Error(Errc::PolicyLengthMismatch, "value function does not match the grid");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = term_scale(tables, i, V);
    std::size_t best_k = 0;
    double best = tables.hamiltonian_term(0, i, V);
    for (std::size_t k = 1; k < tables.controls.size(); ++k) {
      const double val = tables.hamiltonian_term(k, i, V);
      if (better(val, best, tie, scale)) {
        best = val;
        best_k = k;
      }
    }
    v[i] = tables.controls[best_k];
  }
  return Policy(tables.grid, std::move(v));
}

Policy improve(const DiffusionModel& model, const Grid1D& grid, std::span<const double> V, TieBreak tie) {
  return improve(ControlTables::build(model, grid), V, tie);
}

PiaStep evaluate_policy(const DiffusionModel& model, const Policy& policy) {
  const Grid1D& grid = policy.grid();
  const BandedOperator A = assemble_policy_generator(model, grid, policy);
  const std::vector<double> c = cost_vector(model, policy);
  const InvariantDensity density = invariant_density(A, grid);
  const double beta = average_cost(c, density);
  return PiaStep{policy, beta, poisson_value(A, grid, c, beta)};
}

PiaResult run_pia(const DiffusionModel& model, const Grid1D& grid, const Policy& v0, const PiaOptions& opts) {
  if (!(v0.grid() == grid)) throw Error(Errc::PolicyLengthMismatch, "initial policy lives on a different grid");
  v0.check_members(model.controls);

  PiaTrace trace;
  try {
    trace.steps.push_back(evaluate_policy(model, v0));
  } catch (const Error& e) {
    if (e.code() == Errc::TransienceDetected) {
      throw Error(Errc::UnstableInitialPolicy, std::string("initial policy is not stable: ") + e.what());
    }
    throw;
  }
  // Equality is admitted up to round-off: with a constant cost every policy
  // has beta = M* and the problem is degenerate rather than unstable.
  const double m_star = m_star_estimate(model, grid);
  if (!(trace.steps.front().rho <= m_star + kTieRel * std::max(1.0, std::abs(m_star)))) {
    throw Error(Errc::UnstableInitialPolicy, "initial cost rate " + std::to_string(trace.steps.front().rho) +
                                                 " is not below the M* estimate " + std::to_string(m_star));
  }

  const ControlTables tables = ControlTables::build(model, grid);
  trace.reason = Termination::MaxIterations;
  while (trace.iterations < opts.max_iter) {
    const PiaStep& current = trace.steps.back();
    Policy next = improve(tables, current.V.values, opts.tie_break);
    ++trace.iterations;
    if (next == current.policy) {
      trace.reason = Termination::PolicyFixedPoint;
      break;
    }
    PiaStep step = evaluate_policy(model, next);
    const double prev_rho = current.rho;
    if (step.rho > prev_rho + kNonMonotoneSlack) {
      throw Error(Errc::NonMonotone, "cost rate rose from " + std::to_string(prev_rho) + " to " +
                                         std::to_string(step.rho));
    }
    trace.steps.push_back(std::move(step));
    if (std::abs(trace.steps.back().rho - prev_rho) <= opts.tol) {
      trace.reason = Termination::RhoStalled;
      break;
    }
  }
  const PiaStep& last = trace.steps.back();
  return PiaResult{SolutionPair{last.V, last.rho}, std::move(trace)};
}

PiaTrace restart(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair, const PiaOptions& opts) {
  if (!(pair.V.grid == grid)) throw Error(Errc::PolicyLengthMismatch, "pair lives on a different grid");
  const ControlTables tables = ControlTables::build(model, grid);
  Policy selector = improve(tables, pair.V.values, opts.tie_break);
  PiaTrace trace;
  trace.steps.push_back(PiaStep{selector, pair.rho, pair.V});
  trace.steps.push_back(evaluate_policy(model, selector));
  trace.iterations = 1;
  trace.reason = std::abs(trace.steps.back().rho - pair.rho) <= opts.tol ? Termination::RhoStalled
                                                                         : Termination::MaxIterations;
  return trace;
}

DiscountedSolution solve_discounted(const DiffusionModel& model, const Grid1D& grid, double alpha,
                                    std::size_t max_iter) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "discount rate must be positive");
  const ControlTables tables = ControlTables::build(model, grid);
  const std::size_t n = grid.size();

  // Start from the myopic policy: argmin of the running cost.
  std::vector<double> zero(n, 0.0);
  Policy policy = improve(tables, zero);
  std::vector<double> V;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const BandedOperator A = assemble_policy_generator(model, grid, policy);
    V = solve_banded(A, alpha, cost_vector(model, policy));

    // Keep the incumbent control unless another is strictly better, which
    // rules out cycling among tied controls.
    std::vector<double> next(policy.values().begin(), policy.values().end());
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cur_k = static_cast<std::size_t>(
          std::find(tables.controls.begin(), tables.controls.end(), policy[i]) - tables.controls.begin());
      const double scale = term_scale(tables, i, V);
      double best = tables.hamiltonian_term(cur_k, i, V);
      for (std::size_t k = 0; k < tables.controls.size(); ++k) {
        const double val = tables.hamiltonian_term(k, i, V);
        if (better(val, best, TieBreak::Smallest, scale)) {
          best = val;
          next[i] = tables.controls[k];
          changed = true;
        }
      }
    }
    if (!changed) {
      const double F = alpha * V[grid.origin_index()];
      return DiscountedSolution{alpha, std::move(V), std::move(policy), F, it};
    }
    policy = Policy(grid, std::move(next));
  }
  throw Error(Errc::NoConvergence, "discounted policy iteration did not settle in " + std::to_string(max_iter) +
                                       " iterations");
}

VanishingDiscount vanishing_discount_sweep(const DiffusionModel& model, const Grid1D& grid,
                                           std::span<const double> alphas) {
  if (alphas.empty()) throw Error(Errc::InvalidArgument, "empty discount list");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw Error(Errc::InvalidArgument, "discount rates must be positive");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) {
      throw Error(Errc::InvalidArgument, "discount rates must be strictly descending");
    }
  }
  VanishingDiscount out;
  for (double a : alphas) {
    out.alphas.push_back(a);
    out.F.push_back(solve_discounted(model, grid, a).F);
  }
  const std::size_t m = out.F.size();
  if (m == 1) {
    out.extrapolated = out.F[0];
  } else {
    const double a1 = out.alphas[m - 2], a2 = out.alphas[m - 1];
    const double f1 = out.F[m - 2], f2 = out.F[m - 1];
    out.extrapolated = f2 - a2 * (f1 - f2) / (a1 - a2);
  }
  return out;
}

std::vector<TruncationPoint> truncation_sweep(const DiffusionModel& model, const Grid1D& grid, const Policy& frozen,
                                              std::span<const double> radii, const PiaOptions& opts) {
  std::vector<TruncationPoint> out;
  for (double R : radii) {
    const DiffusionModel m = freeze_outside(model, frozen, R);
    const PiaResult res = run_pia(m, grid, frozen, opts);
    out.push_back({R, res.pair.rho, res.trace.iterations});
  }
  return out;
}

}  // namespace ergocheck
