// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ergocheck {

/// Tridiagonal matrix stored by diagonals. sub[0] and super[n-1] are unused
/// and kept at zero.
struct BandedOperator {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  BandedOperator() = default;
  explicit BandedOperator(std::size_t n) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }

  double apply_row(std::size_t i, std::span<const double> v) const noexcept;
  std::vector<double> apply(std::span<const double> v) const;
  BandedOperator transpose() const;

  double row_sum(std::size_t i) const noexcept;
  double max_abs_row_sum() const noexcept;
  double min_off_diagonal() const noexcept;
};

/// Solves the general tridiagonal system M z = rhs by elimination without
/// pivoting. Throws Error(SingularSystem) when a pivot is negligible relative
/// to the magnitude of its row.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs);

/// Solves (shift * I - A) z = rhs.
std::vector<double> solve_banded(const BandedOperator& A, double shift, std::span<const double> rhs);

}  // namespace ergocheck
