// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/discretize.hpp"

#include <algorithm>
#include <string>

#include "ergocheck/error.hpp"

namespace ergocheck {

BandedOperator assemble_generator(const Grid1D& grid, const std::vector<double>& diffusion,
                                  const std::vector<double>& drift) {
  const std::size_t n = grid.size();
  if (diffusion.size() != n || drift.size() != n) {
    throw Error(Errc::PolicyLengthMismatch, "coefficient tables do not match the grid");
  }
  const double h = grid.spacing();
  const double h2 = h * h;
  BandedOperator A(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = diffusion[i];
    const double b = drift[i];
    double up = a / h2 + std::max(b, 0.0) / h;
    double down = a / h2 + std::max(-b, 0.0) / h;
    if (i == 0) {
      up += down;
      down = 0.0;
    } else if (i == n - 1) {
      down += up;
      up = 0.0;
    }
    A.sub[i] = down;
    A.super[i] = up;
    A.diag[i] = -(down + up);
  }
  return A;
}

BandedOperator assemble_policy_generator(const DiffusionModel& model, const Grid1D& grid, const Policy& policy) {
  const std::size_t n = grid.size();
  if (policy.size() != n) {
    throw Error(Errc::PolicyLengthMismatch, "policy length " + std::to_string(policy.size()) +
                                                " != grid size " + std::to_string(n));
  }
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    a[i] = model.diffusion(x);
    b[i] = model.drift(x, policy[i]);
  }
  return assemble_generator(grid, a, b);
}

std::vector<BandedOperator> assemble_control_generators(const DiffusionModel& model, const Grid1D& grid) {
  std::vector<BandedOperator> out;
  out.reserve(model.controls.size());
  for (double u : model.controls.values()) {
    out.push_back(assemble_policy_generator(model, grid, Policy::constant(grid, u)));
  }
  return out;
}

}  // namespace ergocheck
