// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/policy.hpp"

#include <cmath>
#include <string>

#include "ergocheck/error.hpp"
#include "ergocheck/model.hpp"

namespace ergocheck {

Policy::Policy(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(Errc::PolicyLengthMismatch, "policy has " + std::to_string(values_.size()) +
                                                " values for a grid of " + std::to_string(grid_.size()));
  }
}

Policy Policy::constant(const Grid1D& grid, double u) { return Policy(grid, std::vector<double>(grid.size(), u)); }

Policy Policy::from_feedback(const Grid1D& grid, const ControlSet& controls,
                             const std::function<double(double)>& feedback) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = controls.nearest(feedback(grid.x(i)));
  return Policy(grid, std::move(v));
}

double Policy::lookup(double x) const {
  if (std::abs(x) > grid_.half_width() + 0.5 * grid_.spacing()) {
    throw Error(Errc::PolicyDomainMismatch, "policy grid does not cover x = " + std::to_string(x));
  }
  return values_[grid_.nearest_index(x)];
}

double Policy::lookup_clamped(double x) const noexcept { return values_[grid_.nearest_index(x)]; }

void Policy::check_members(const ControlSet& controls) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!controls.contains(values_[i])) {
      throw Error(Errc::InvalidArgument,
                  "policy value " + std::to_string(values_[i]) + " at node " + std::to_string(i) +
                      " is not in the control set");
    }
  }
}

}  // namespace ergocheck
