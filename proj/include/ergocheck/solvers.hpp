// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ergocheck/banded.hpp"
#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"
#include "ergocheck/valuedet.hpp"

namespace ergocheck {

/// Candidate (V, rho) for the average-cost HJB.
struct SolutionPair {
  ValueFunction V;
  double rho;
};

enum class TieBreak { Smallest, Largest };

enum class Termination { PolicyFixedPoint, RhoStalled, MaxIterations };
const char* to_string(Termination t) noexcept;

struct PiaStep {
  Policy policy;
  double rho;
  ValueFunction V;
};

struct PiaTrace {
  std::vector<PiaStep> steps;  // steps[0] is value determination of v0
  std::size_t iterations = 0;  // number of improvement steps performed
  Termination reason = Termination::MaxIterations;

  std::vector<double> rhos() const;
};

struct PiaOptions {
  double tol = 1e-9;
  std::size_t max_iter = 50;
  TieBreak tie_break = TieBreak::Smallest;
};

struct PiaResult {
  SolutionPair pair;
  PiaTrace trace;
};

/// Per-control generators and costs on a grid, assembled once and reused by
/// improvement steps.
struct ControlTables {
  Grid1D grid;
  std::vector<double> controls;
  std::vector<BandedOperator> generators;  // one per control
  std::vector<std::vector<double>> costs;  // costs[k][i] = c(x_i, u_k)

  static ControlTables build(const DiffusionModel& model, const Grid1D& grid);

  /// (A_u V)_i + c(x_i, u) for control index k.
  double hamiltonian_term(std::size_t k, std::size_t i, std::span<const double> V) const noexcept {
    return generators[k].apply_row(i, V) + costs[k][i];
  }
};

/// Policy improvement: at each node the control minimizing (A_u V)_i + c(x_i, u).
Policy improve(const ControlTables& tables, std::span<const double> V, TieBreak tie = TieBreak::Smallest);
Policy improve(const DiffusionModel& model, const Grid1D& grid, std::span<const double> V,
               TieBreak tie = TieBreak::Smallest);

/// Value determination for one policy: density, average cost and the
/// origin-normalized Poisson solution.
PiaStep evaluate_policy(const DiffusionModel& model, const Policy& policy);

/// Policy iteration from a stable v0. Throws UnstableInitialPolicy if v0 is
/// transient or its cost is not below the estimate of M*, NonMonotone if the
/// cost rate rises by more than 1e-8 between iterations.
PiaResult run_pia(const DiffusionModel& model, const Grid1D& grid, const Policy& v0, const PiaOptions& opts = {});

/// One improvement from pair.V followed by value determination.
/// trace.steps = {the input pair (with the selector as policy), the new pair}.
PiaTrace restart(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair,
                 const PiaOptions& opts = {});

struct DiscountedSolution {
  double alpha;
  std::vector<double> V;
  Policy policy;
  double F;  // alpha * V(origin)
  std::size_t iterations;
};

/// Discounted HJB min_u [A_u V + c_u] = alpha V by policy iteration.
DiscountedSolution solve_discounted(const DiffusionModel& model, const Grid1D& grid, double alpha,
                                    std::size_t max_iter = 200);

struct VanishingDiscount {
  std::vector<double> alphas;
  std::vector<double> F;
  /// Linear extrapolation to alpha = 0 through the two smallest alphas.
  double extrapolated;
};

/// Throws InvalidArgument unless alphas are strictly descending and positive.
VanishingDiscount vanishing_discount_sweep(const DiffusionModel& model, const Grid1D& grid,
                                           std::span<const double> alphas);

struct TruncationPoint {
  double radius;
  double rho_R;
  std::size_t iterations;
};

/// For each radius freezes the controls to `frozen` outside |x| >= R and runs
/// policy iteration (started from `frozen`) on the resulting model.
std::vector<TruncationPoint> truncation_sweep(const DiffusionModel& model, const Grid1D& grid, const Policy& frozen,
                                              std::span<const double> radii, const PiaOptions& opts = {});

}  // namespace ergocheck
