// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ergocheck/grid.hpp"

namespace ergocheck {

class ControlSet;

/// Stationary Markov policy tabulated on a grid: one control value per node.
class Policy {
 public:
  Policy(Grid1D grid, std::vector<double> values);

  static Policy constant(const Grid1D& grid, double u);
  /// Tabulates `feedback` on the nodes and snaps each value to the nearest
  /// member of `controls`.
  static Policy from_feedback(const Grid1D& grid, const ControlSet& controls,
                              const std::function<double(double)>& feedback);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Nearest-node lookup. Throws PolicyDomainMismatch when x lies more than
  /// half a cell outside the tabulated range.
  double lookup(double x) const;
  /// Nearest-node lookup, clamped to the end nodes.
  double lookup_clamped(double x) const noexcept;

  /// Throws InvalidArgument unless every value is a member of `controls`.
  void check_members(const ControlSet& controls) const;

  bool operator==(const Policy& other) const noexcept {
    return grid_ == other.grid_ && values_ == other.values_;
  }

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

}  // namespace ergocheck
