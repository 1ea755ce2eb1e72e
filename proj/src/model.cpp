// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ergocheck/error.hpp"

namespace ergocheck {

ControlSet::ControlSet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(Errc::InvalidArgument, "control set is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw Error(Errc::InvalidArgument, "control values must be finite");
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw Error(Errc::InvalidArgument, "control values must be strictly ascending");
    }
  }
}

ControlSet ControlSet::uniform(double lo, double hi, std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "control set needs at least one point");
  if (n == 1) return ControlSet({lo});
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  v.back() = hi;
  return ControlSet(std::move(v));
}

bool ControlSet::contains(double u) const noexcept {
  return std::binary_search(values_.begin(), values_.end(), u);
}

double ControlSet::nearest(double u) const noexcept {
  double best = values_.front();
  for (double v : values_) {
    if (std::abs(v - u) < std::abs(best - u)) best = v;
  }
  return best;
}

DiffusionModel builtin_example(ControlSet controls) {
  return DiffusionModel{
      "example",
      [](double, double u) { return u; },
      [](double) { return 1.0; },
      [](double x, double) { return 1.0 - std::exp(-std::abs(x)); },
      std::move(controls),
  };
}

DiffusionModel ou_model() {
  return DiffusionModel{
      "ou",
      [](double x, double) { return -x; },
      [](double) { return 1.0; },
      [](double x, double) { return x * x; },
      ControlSet({0.0}),
  };
}

DiffusionModel constant_cost_model(double kappa, ControlSet controls) {
  if (!(kappa >= 0.0)) throw Error(Errc::InvalidArgument, "constant cost must be nonnegative");
  return DiffusionModel{
      "constant",
      [](double x, double u) { return u - x; },
      [](double) { return 1.0; },
      [kappa](double, double) { return kappa; },
      std::move(controls),
  };
}

std::vector<BuiltinModelInfo> list_builtin_models() {
  return {
      {"example", "dX = U dt + dW, U in [-1,1], c(x) = 1 - exp(-|x|)"},
      {"ou", "dX = -X dt + dW (uncontrolled), c(x) = x^2"},
      {"constant", "dX = (U - X) dt + dW, c = 0.5"},
  };
}

DiffusionModel builtin_model(const std::string& name, const ControlSet* controls) {
  if (name == "example") return controls ? builtin_example(*controls) : builtin_example();
  if (name == "ou") return ou_model();
  if (name == "constant") return controls ? constant_cost_model(0.5, *controls) : constant_cost_model(0.5);
  throw Error(Errc::InvalidConfig, "unknown model '" + name + "'");
}

ModelTables tabulate(const DiffusionModel& model, const Grid1D& grid) {
  const std::size_t n = grid.size();
  const std::size_t m = model.controls.size();
  ModelTables t;
  t.drift.resize(n * m);
  t.cost.resize(n * m);
  t.diffusion.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    t.diffusion[i] = model.diffusion(x);
    for (std::size_t k = 0; k < m; ++k) {
      t.drift[i * m + k] = model.drift(x, model.controls[k]);
      t.cost[i * m + k] = model.cost(x, model.controls[k]);
    }
  }
  return t;
}

double m_star_estimate(const DiffusionModel& model, const Grid1D& grid) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : {grid.x(0), grid.x(grid.size() - 1)}) {
    for (double u : model.controls.values()) m = std::min(m, model.cost(x, u));
  }
  return m;
}

AssumptionReport check_assumptions(const DiffusionModel& model, const Grid1D& grid, double rho_candidate) {
  const std::size_t n = grid.size();
  const auto controls = model.controls.values();
  const ModelTables t = tabulate(model, grid);
  const std::size_t m = controls.size();

  AssumptionReport rep{};
  rep.min_diffusion = *std::min_element(t.diffusion.begin(), t.diffusion.end());
  if (!(rep.min_diffusion > 0.0)) {
    throw Error(Errc::NonDegeneracyViolation,
                "a(x) = sigma^2/2 has minimum " + std::to_string(rep.min_diffusion) + " on the grid");
  }
  for (std::size_t j = 0; j < t.cost.size(); ++j) {
    if (t.cost[j] < 0.0) {
      throw Error(Errc::NegativeCost, "running cost is negative at node " + std::to_string(j / m));
    }
  }

  // Lipschitz estimates over nested radii from neighbor differences.
  const double h = grid.spacing();
  const double L = grid.half_width();
  for (double R : {0.25 * L, 0.5 * L, L}) {
    LipschitzEstimate e{R, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(grid.x(i)) > R + 1e-12 || std::abs(grid.x(i + 1)) > R + 1e-12) continue;
      for (std::size_t k = 0; k < m; ++k) {
        e.drift = std::max(e.drift, std::abs(t.drift[(i + 1) * m + k] - t.drift[i * m + k]) / h);
        e.cost = std::max(e.cost, std::abs(t.cost[(i + 1) * m + k] - t.cost[i * m + k]) / h);
      }
      const double s0 = model.dispersion(grid.x(i));
      const double s1 = model.dispersion(grid.x(i + 1));
      e.dispersion = std::max(e.dispersion, std::abs(s1 - s0) / h);
    }
    rep.lipschitz.push_back(e);
  }
  rep.lipschitz_drift = rep.lipschitz.back().drift;
  rep.lipschitz_cost = rep.lipschitz.back().cost;

  double growth = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double s = model.dispersion(x);
    for (std::size_t k = 0; k < m; ++k) {
      const double b = t.drift[i * m + k];
      growth = std::max(growth, (b * b + s * s) / (1.0 + x * x));
    }
  }
  rep.growth_const = growth;
  rep.m_star_estimate = m_star_estimate(model, grid);
  rep.near_monotone_margin = rep.m_star_estimate - rho_candidate;
  return rep;
}

DiffusionModel freeze_outside(const DiffusionModel& model, const Policy& policy, double radius) {
  if (!(radius >= 0.0)) throw Error(Errc::InvalidArgument, "freezing radius must be nonnegative");
  policy.check_members(model.controls);
  auto base = std::make_shared<const DiffusionModel>(model);
  auto frozen = std::make_shared<const Policy>(policy);

  DiffusionModel out{
      model.name + "/frozen(R=" + std::to_string(radius) + ")",
      [base, frozen, radius](double x, double u) {
        return std::abs(x) < radius ? base->drift(x, u) : base->drift(x, frozen->lookup(x));
      },
      model.dispersion,
      [base, frozen, radius](double x, double u) {
        return std::abs(x) < radius ? base->cost(x, u) : base->cost(x, frozen->lookup(x));
      },
      model.controls,
  };
  return out;
}

BoundedCostModel bounded_cost_transform(const DiffusionModel& model, const Grid1D& grid, double rho_candidate,
                                        double ratio_cap) {
  const std::size_t n = grid.size();
  const auto controls = model.controls.values();

  double ratio = 1.0;
  double g_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    for (double u : controls) {
      const double c = model.cost(x, u);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    if (cmax > 0.0) {
      // A zero denominator with a positive numerator is an unbounded ratio.
      const double r = cmin > 0.0 ? cmax / cmin : std::numeric_limits<double>::infinity();
      ratio = std::max(ratio, r);
    }
    g_min = std::min(g_min, 1.0 + cmin);
  }
  if (ratio > ratio_cap) {
    throw Error(Errc::RatioUnbounded, "sampled cost ratio " + std::to_string(ratio) + " exceeds cap " +
                                          std::to_string(ratio_cap));
  }

  auto base = std::make_shared<const DiffusionModel>(model);
  auto g = [base](double x) {
    double cmin = std::numeric_limits<double>::infinity();
    for (double u : base->controls.values()) cmin = std::min(cmin, base->cost(x, u));
    return 1.0 + cmin;
  };
  const double rho = rho_candidate;
  BoundedCostModel out{
      DiffusionModel{
          model.name + "/bounded",
          [base, g](double x, double u) { return base->drift(x, u) / g(x); },
          [base, g](double x) { return base->dispersion(x) / g(x); },
          [base, g, rho, g_min](double x, double u) {
            return rho / g_min + (1.0 + base->cost(x, u) - rho) / g(x);
          },
          model.controls,
      },
      ratio,
      g_min,
      0.0,
  };
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double u : controls) sup = std::max(sup, out.model.cost(grid.x(i), u));
  }
  out.cost_sup = sup;
  return out;
}

}  // namespace ergocheck
