// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace ergocheck {

/// Uniform grid on [-L, L] with an odd node count, so that x = 0 is a node.
class Grid1D {
 public:
  Grid1D(double half_width, std::size_t n_nodes);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  std::size_t origin_index() const noexcept { return (n_ - 1) / 2; }

  /// Node coordinate. The origin node is exactly 0 and the grid is exactly
  /// symmetric: x(i) == -x(n-1-i).
  double x(std::size_t i) const noexcept;

  /// Index of the node closest to `x`, clamped to the grid.
  std::size_t nearest_index(double x) const noexcept;

  std::vector<double> nodes() const;

  bool operator==(const Grid1D& other) const noexcept {
    return n_ == other.n_ && half_width_ == other.half_width_;
  }

 private:
  double half_width_;
  std::size_t n_;
  double h_;
};

/// Throws Error(InvalidGrid) unless N is odd, N >= 3 and L > 0.
Grid1D build_grid(double half_width, std::size_t n_nodes);

}  // namespace ergocheck
