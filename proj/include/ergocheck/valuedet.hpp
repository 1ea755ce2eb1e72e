// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ergocheck/banded.hpp"
#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"

namespace ergocheck {

/// Discrete invariant density: psi_i >= 0 with sum(psi_i * h) == 1.
struct InvariantDensity {
  Grid1D grid;
  std::vector<double> psi;

  /// Probability mass per node, psi_i * h.
  std::vector<double> masses() const;
};

struct ValueFunction {
  Grid1D grid;
  std::vector<double> values;
  bool normalized = false;  // values[origin] == 0

  double at_origin() const { return values[grid.origin_index()]; }
};

/// Solves A^T psi = 0 with the origin row pinned, then normalizes.
/// Throws TransienceDetected if more than half of the mass sits in the outer
/// 5% of nodes on either side: the chain is held only by the reflecting wall.
InvariantDensity invariant_density(const BandedOperator& generator, const Grid1D& grid);

/// c(x_i, v_i) per node.
std::vector<double> cost_vector(const DiffusionModel& model, const Policy& policy);

/// beta = sum_i c(x_i, v_i) psi_i h
double average_cost(const DiffusionModel& model, const Policy& policy, const InvariantDensity& density);
double average_cost(std::span<const double> cost, const InvariantDensity& density);

/// Solves A V = beta - c with V(origin) = 0. The system is singular and is
/// consistent only when beta is the average cost under the same discrete
/// density; otherwise throws InconsistentSystem.
ValueFunction poisson_value(const BandedOperator& generator, const Grid1D& grid, std::span<const double> cost,
                            double beta);

/// Solves A V = rho - c at every row except the right wall, with V(origin) = 0.
/// When rho equals the average cost this coincides with the Poisson solution.
/// For any other rho it is the grid branch that integrates the flux from the
/// left wall, the discrete counterpart of a value function built from an
/// integral starting at -infinity.
ValueFunction flux_integrated_value(const BandedOperator& generator, const Grid1D& grid,
                                    std::span<const double> cost, double rho);

/// Expected accumulated (c - rho) until first entry into the closed ball of
/// radius r, as the solution of a Dirichlet problem on the exterior nodes.
struct ExitFunctional {
  Grid1D grid;
  double r_snapped;         // |x| of the inner boundary nodes
  std::size_t inner_left;   // index of the node at -r_snapped
  std::size_t inner_right;  // index of the node at +r_snapped
  std::vector<double> values;  // zero on the inner ball

  bool in_domain(std::size_t i) const noexcept { return i <= inner_left || i >= inner_right; }
};

/// Throws InvalidRadius unless 0 < r < L.
ExitFunctional exit_functional(const DiffusionModel& model, const Policy& policy, double r, double rho);

/// Variant on an already assembled generator and cost vector.
ExitFunctional exit_functional(const BandedOperator& generator, const Grid1D& grid, std::span<const double> cost,
                               double r, double rho);

}  // namespace ergocheck
