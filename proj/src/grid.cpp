// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/grid.hpp"

#include <cmath>
#include <string>

#include "ergocheck/error.hpp"

namespace ergocheck {

Grid1D::Grid1D(double half_width, std::size_t n_nodes)
    : half_width_(half_width), n_(n_nodes), h_(0.0) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw Error(Errc::InvalidGrid, "half-width must be positive and finite");
  }
  if (n_nodes < 3 || n_nodes % 2 == 0) {
    throw Error(Errc::InvalidGrid,
                "node count must be odd and >= 3, got " + std::to_string(n_nodes));
  }
  h_ = 2.0 * half_width / static_cast<double>(n_nodes - 1);
}

double Grid1D::x(std::size_t i) const noexcept {
  // Offsets are computed from the origin so that the grid is symmetric bit for bit.
  const auto o = static_cast<long long>(origin_index());
  const auto k = static_cast<long long>(i) - o;
  if (k == 0) return 0.0;
  const double mag = half_width_ * static_cast<double>(k < 0 ? -k : k) / static_cast<double>(o);
  return k < 0 ? -mag : mag;
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
  if (std::isnan(x)) return origin_index();
  const double pos = (x + half_width_) / h_;
  if (pos <= 0.0) return 0;
  const auto last = static_cast<double>(n_ - 1);
  if (pos >= last) return n_ - 1;
  return static_cast<std::size_t>(std::llround(pos));
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

Grid1D build_grid(double half_width, std::size_t n_nodes) { return Grid1D(half_width, n_nodes); }

}  // namespace ergocheck
