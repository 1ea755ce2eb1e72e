// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"

namespace ergocheck {

struct SimConfig {
  double dt = 1e-2;
  double T = 500.0;
  std::size_t n_paths = 400;
  std::uint64_t seed = 20240101;
  double x0 = 0.0;
  /// Reflect at +-reflect_at when set.
  std::optional<double> reflect_at;

  /// Throws InvalidConfig unless dt > 0, T > 0 and n_paths >= 1.
  void validate() const;
};

struct PathStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  static PathStats from_samples(std::span<const double> samples);
};

/// Per-path time averages (1/T) int_0^T c(X_s, v(X_s)) ds by left-endpoint
/// sums along Euler-Maruyama paths; mean and standard error over paths.
/// Each path draws from its own stream seeded by (seed, path index).
PathStats simulate_average_cost(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg);

/// Same simulation, returning every per-path average (pathwise criterion).
std::vector<double> simulate_path_averages(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg);

struct ExitEstimate {
  PathStats psi;                     // int_0^tau (c - rho) dt
  std::optional<PathStats> v_exit;   // V(X_tau), when V is supplied
  std::optional<PathStats> combined; // psi + V(X_tau) per path
  double censored_fraction = 0.0;
};

/// Paths start at x0 (|x0| >= r) and run until the first step inside the
/// closed ball of radius r, or until cfg.T (censored). V, when given, is a
/// table on `value_grid` evaluated by linear interpolation.
/// Throws CensoringExcessive if more than 1% of paths are censored.
ExitEstimate estimate_exit_functional(const DiffusionModel& model, const Policy& policy, double x0, double r,
                                      double rho, const SimConfig& cfg,
                                      std::optional<std::span<const double>> V = std::nullopt);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<double> mass;   // sums to 1
};

/// Normalized histogram of X_t over all paths after a burn-in of T/10, on
/// `bins` equal cells over [lo, hi].
Histogram occupation_histogram(const DiffusionModel& model, const Policy& policy, const SimConfig& cfg,
                               std::size_t bins, double lo, double hi);

}  // namespace ergocheck
