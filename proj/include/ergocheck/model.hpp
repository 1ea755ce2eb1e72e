// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ergocheck/grid.hpp"
#include "ergocheck/policy.hpp"

namespace ergocheck {

/// Finite discretization of the compact control set: non-empty, strictly
/// ascending, finite.
class ControlSet {
 public:
  explicit ControlSet(std::vector<double> values);
  /// n points spread evenly over [lo, hi].
  static ControlSet uniform(double lo, double hi, std::size_t n);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  bool contains(double u) const noexcept;
  double nearest(double u) const noexcept;

 private:
  std::vector<double> values_;
};

using DriftFn = std::function<double(double x, double u)>;
using DispersionFn = std::function<double(double x)>;
using CostFn = std::function<double(double x, double u)>;

/// One-dimensional controlled diffusion dX = b(X,U) dt + sigma(X) dW with
/// running cost c(X,U). Immutable once built; the evaluators must be pure.
struct DiffusionModel {
  std::string name;
  DriftFn drift;
  DispersionFn dispersion;
  CostFn cost;
  ControlSet controls;

  /// a(x) = sigma(x)^2 / 2
  double diffusion(double x) const {
    const double s = dispersion(x);
    return 0.5 * s * s;
  }
};

/// dX = U dt + dW, U in [-1, 1], c(x) = 1 - exp(-|x|).
DiffusionModel builtin_example(ControlSet controls = ControlSet({-1.0, 0.0, 1.0}));
/// Uncontrolled Ornstein-Uhlenbeck process b = -x, sigma = 1, c = x^2, control set {0}.
DiffusionModel ou_model();
/// b = u - x, sigma = 1, c = kappa for every (x, u).
DiffusionModel constant_cost_model(double kappa, ControlSet controls = ControlSet({-1.0, 0.0, 1.0}));

struct BuiltinModelInfo {
  std::string name;
  std::string description;
};
std::vector<BuiltinModelInfo> list_builtin_models();
/// Looks up a built-in model by name; throws InvalidConfig for unknown names.
DiffusionModel builtin_model(const std::string& name, const ControlSet* controls = nullptr);

struct LipschitzEstimate {
  double radius;
  double drift;
  double cost;
  double dispersion;
};

struct AssumptionReport {
  double min_diffusion;
  std::vector<LipschitzEstimate> lipschitz;
  double lipschitz_drift;  // over the whole grid
  double lipschitz_cost;   // over the whole grid
  double growth_const;     // max (b^2 + sigma^2) / (1 + x^2)
  double m_star_estimate;  // min over u of c at x = +-L
  double near_monotone_margin;
};

/// Sampled diagnostics of the regularity, growth and non-degeneracy
/// conditions. Throws NonDegeneracyViolation if a(x) <= 0 at some node and
/// NegativeCost if c < 0 at some (node, control).
AssumptionReport check_assumptions(const DiffusionModel& model, const Grid1D& grid, double rho_candidate);

/// min over u of c at the two end nodes.
double m_star_estimate(const DiffusionModel& model, const Grid1D& grid);

/// Replaces the drift and cost by their values under `policy` for |x| >= R.
/// Inside the ball the model is untouched.
DiffusionModel freeze_outside(const DiffusionModel& model, const Policy& policy, double radius);

struct BoundedCostModel {
  DiffusionModel model;
  double cost_ratio;  // sampled sup of c(x,u') / c(x,u)
  double g_min;       // min over the grid of g = 1 + min_u c
  double cost_sup;    // sup of the transformed cost over the grid
};

/// Time change by g(x) = 1 + min_u c(x,u): sigma/g, b/g and
/// c~ = rho / min g + (1 + c - rho) / g, with the candidate rho standing in
/// for the optimal value. Throws RatioUnbounded if the sampled cost ratio
/// exceeds `ratio_cap`.
BoundedCostModel bounded_cost_transform(const DiffusionModel& model, const Grid1D& grid, double rho_candidate,
                                        double ratio_cap = 1e6);

/// Drift/cost tables at every (node, control), row-major by node.
struct ModelTables {
  std::vector<double> drift;
  std::vector<double> cost;
  std::vector<double> diffusion;
};
ModelTables tabulate(const DiffusionModel& model, const Grid1D& grid);

}  // namespace ergocheck
