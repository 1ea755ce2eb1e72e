// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ergocheck/banded.hpp"
#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"

namespace ergocheck {

/// Upwind Markov-chain approximation of L^u f = a f'' + b f'.
///
/// Interior row i:
///   super_i = a_i/h^2 + max(b_i, 0)/h
///   sub_i   = a_i/h^2 + max(-b_i, 0)/h
///   diag_i  = -(sub_i + super_i)
/// At the two end nodes the outward rate is folded onto the inward neighbor
/// (reflection), so every row sums to zero and the off-diagonals stay
/// nonnegative: the operator is the generator of a continuous-time chain.
BandedOperator assemble_policy_generator(const DiffusionModel& model, const Grid1D& grid, const Policy& policy);

/// One generator per control value, in control-set order.
std::vector<BandedOperator> assemble_control_generators(const DiffusionModel& model, const Grid1D& grid);

/// Generator for an explicit per-node drift table.
BandedOperator assemble_generator(const Grid1D& grid, const std::vector<double>& diffusion,
                                  const std::vector<double>& drift);

}  // namespace ergocheck
