// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"
#include "ergocheck/solvers.hpp"

namespace ergocheck {

enum class Verdict { Compatible, Spurious, Undecided };
const char* to_string(Verdict v) noexcept;

struct HjbResidual {
  /// min_u [(A_u V)_i + c(x_i,u)] - rho at interior nodes; zero at the two walls.
  std::vector<double> residual;
  double sup;
  /// sup of |residual_i| / (1 + |a_i D2V_i| + max_u |b_i DV_i|): the residual
  /// measured against the size of the operator terms, so that the O(h)
  /// consistency error of the scheme does not masquerade as a violation where
  /// V grows fast.
  double scaled_sup;
};

HjbResidual hjb_residual(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair);

struct SemigroupResult {
  double slope;
  std::vector<double> times;
  /// m(t) = E[V(X_0)] + E[int_0^t (A V)(X_s) ds] with A applied at interior nodes.
  std::vector<double> drift_path;
  /// Plain E[V(X_t)] under the reflected chain, for reference.
  std::vector<double> mean_path;
};

/// Dynkin-drift form of the t^{-1} E[V(X_t)] -> 0 test. The law of the chain
/// started from `initial` (default: point mass at the origin) is advanced by
/// implicit Euler; the accumulated drift of V excludes the two wall rows, since
/// on a reflected domain E[V(X_t)] itself is eventually stationary for every V.
/// Returns the least-squares slope of m(t) over [T/2, T].
SemigroupResult semigroup_drift_test(const DiffusionModel& model, const Grid1D& grid, const Policy& policy,
                                     std::span<const double> V, double horizon, std::size_t steps,
                                     std::optional<std::vector<double>> initial = std::nullopt);

struct LyapunovResult {
  bool success;
  double epsilon;   // -max over |x| > r_D of (A_v W)_i
  double worst_x;   // node attaining the max
};

LyapunovResult foster_lyapunov_check(const DiffusionModel& model, const Grid1D& grid, const Policy& policy,
                                     std::span<const double> lyapunov, double r_domain);

struct VerifyOptions {
  double gap_tol = 1e-2;
  double residual_tol = 5e-3;
  TieBreak tie_break = TieBreak::Smallest;
  double semigroup_horizon = 50.0;
  std::size_t semigroup_steps = 500;
  double lyapunov_radius = 1.0;
};

struct CompatibilityReport {
  Policy selector;
  double beta;
  double rho;
  double gap;
  Verdict verdict;
  double hjb_residual_sup;         // scaled residual, see HjbResidual
  double hjb_residual_abs_sup;
  std::optional<double> lyapunov_epsilon;  // absent when the check fails
  std::optional<double> semigroup_slope;   // absent when the selector is transient
  double bounded_below_min;
  double m_star_estimate;
  bool transient_selector;
  std::string note;
};

/// Definition-1 check on the grid: extract the minimizing selector, compute
/// its invariant density and average cost, and compare with rho.
/// Throws RhoOutOfRange if rho >= the M* estimate. A transient selector is
/// reported (verdict Undecided, transient_selector = true), not thrown.
CompatibilityReport check_compatible(const DiffusionModel& model, const Grid1D& grid, const SolutionPair& pair,
                                     const VerifyOptions& opts = {});

}  // namespace ergocheck
