// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"
#include "ergocheck/sde.hpp"
#include "ergocheck/solvers.hpp"
#include "ergocheck/verify.hpp"

namespace ergocheck::cli {

inline constexpr int kSchemaVersion = 1;

/// Either a built-in name or three expressions (drift and cost in x and u,
/// dispersion in x only).
struct ModelSpec {
  std::string name = "example";
  std::optional<std::string> drift;
  std::optional<std::string> dispersion;
  std::optional<std::string> cost;

  bool is_inline() const noexcept { return drift.has_value(); }
};

/// How a policy is produced from the config: the selector w_rho of the
/// built-in example, a constant control, or a feedback expression in x.
struct PolicySpec {
  std::string kind = "w_rho";
  double rho = 0.8;
  double value = 0.0;
  std::string expr;
};

struct RunConfig {
  ModelSpec model;
  double L = 8.0;
  std::size_t N = 4001;
  std::vector<double> controls{-1.0, 0.0, 1.0};

  double pia_tol = 1e-9;
  double gap_tol = 1e-2;
  double residual_tol = 5e-3;
  double quad_tol = 1e-10;

  std::size_t max_iter = 50;
  PolicySpec initial_policy{};

  std::vector<double> rhos;  // sweep-rho; empty means 0.40:0.90:0.05
  std::vector<double> alphas{0.5, 0.1, 0.02, 0.004};
  std::vector<double> radii{1.0, 2.0, 4.0};
  PolicySpec frozen_policy{"w_rho", 0.6, 0.0, ""};

  double semigroup_horizon = 50.0;
  std::size_t semigroup_steps = 500;
  double lyapunov_radius = 1.0;
  std::string pair_file;

  SimConfig sim{};
  bool reflect = false;
  PolicySpec sim_policy{"w_rho", 1.0 / 3.0, 0.0, ""};
  std::string sim_mode = "average";  // average | exit
  double exit_x0 = 2.0;
  double exit_radius = 1.0;
  double exit_rho = 1.0 / 3.0;

  /// Parses a config document. Unknown keys are rejected so that typos fail
  /// loudly. Throws Error(InvalidConfig).
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Range and consistency checks mirroring the library preconditions.
  void validate() const;

  Grid1D grid() const;
  ControlSet control_set() const;
  DiffusionModel build_model() const;
  Policy build_policy(const PolicySpec& spec, const DiffusionModel& model, const Grid1D& grid) const;
  PiaOptions pia_options() const;
  VerifyOptions verify_options() const;
  SimConfig sim_config() const;
  std::vector<double> sweep_rhos() const;
};

/// "a:b:step" (inclusive, tolerant to rounding of the last point) or a
/// comma-separated list. Throws Error(ParseError).
std::vector<double> parse_range(const std::string& text);

/// Comma-separated list of numbers. Throws Error(ParseError).
std::vector<double> parse_list(const std::string& text);

}  // namespace ergocheck::cli
