// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ergocheck/error.hpp"

namespace ergocheck {

namespace {
// Relative pivot floor. Generators with zero row sums produce a final pivot at
// round-off level (~1e-16 relative); legitimately shifted systems stay many
// orders of magnitude above this.
constexpr double kPivotFloor = 1e-11;
}  // namespace

double BandedOperator::apply_row(std::size_t i, std::span<const double> v) const noexcept {
  double acc = diag[i] * v[i];
  if (i > 0) acc += sub[i] * v[i - 1];
  if (i + 1 < size()) acc += super[i] * v[i + 1];
  return acc;
}

std::vector<double> BandedOperator::apply(std::span<const double> v) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = apply_row(i, v);
  return out;
}

BandedOperator BandedOperator::transpose() const {
  const std::size_t n = size();
  BandedOperator t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.diag[i] = diag[i];
    if (i > 0) t.sub[i] = super[i - 1];
    if (i + 1 < n) t.super[i] = sub[i + 1];
  }
  return t;
}

double BandedOperator::row_sum(std::size_t i) const noexcept {
  double s = diag[i];
  if (i > 0) s += sub[i];
  if (i + 1 < size()) s += super[i];
  return s;
}

double BandedOperator::max_abs_row_sum() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(row_sum(i)));
  return m;
}

double BandedOperator::min_off_diagonal() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    if (i > 0) m = std::min(m, sub[i]);
    if (i + 1 < size()) m = std::min(m, super[i]);
  }
  return m;
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n) {
    throw Error(Errc::InvalidArgument, "tridiagonal system with inconsistent band lengths");
  }
  if (n == 0) return {};

  std::vector<double> c(n, 0.0);  // modified super-diagonal
  std::vector<double> z(n, 0.0);
  auto check_pivot = [&](std::size_t i, double pivot) {
    double scale = std::abs(diag[i]);
    if (i > 0) scale += std::abs(sub[i]);
    if (i + 1 < n) scale += std::abs(super[i]);
    if (!std::isfinite(pivot) || std::abs(pivot) <= kPivotFloor * scale || scale == 0.0) {
      throw Error(Errc::SingularSystem, "negligible pivot at row " + std::to_string(i));
    }
  };

  double pivot = diag[0];
  check_pivot(0, pivot);
  c[0] = n > 1 ? super[0] / pivot : 0.0;
  z[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i] * c[i - 1];
    check_pivot(i, pivot);
    c[i] = i + 1 < n ? super[i] / pivot : 0.0;
    z[i] = (rhs[i] - sub[i] * z[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) z[i] -= c[i] * z[i + 1];
  return z;
}

std::vector<double> solve_banded(const BandedOperator& A, double shift, std::span<const double> rhs) {
  const std::size_t n = A.size();
  if (rhs.size() != n) throw Error(Errc::InvalidArgument, "rhs length does not match operator");
  std::vector<double> sub(n), diag(n), super(n);
  for (std::size_t i = 0; i < n; ++i) {
    sub[i] = -A.sub[i];
    diag[i] = shift - A.diag[i];
    super[i] = -A.super[i];
  }
  return solve_tridiagonal(sub, diag, super, rhs);
}

}  // namespace ergocheck
