// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/valuedet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ergocheck/discretize.hpp"
#include "ergocheck/error.hpp"

namespace ergocheck {

namespace {

constexpr double kTransienceMass = 0.5;
constexpr double kOuterFraction = 0.05;
constexpr double kConsistencyTol = 1e-8;

void check_size(const BandedOperator& A, const Grid1D& grid) {
  if (A.size() != grid.size()) {
    throw Error(Errc::PolicyLengthMismatch, "operator size does not match the grid");
  }
}

}  // namespace

std::vector<double> InvariantDensity::masses() const {
  std::vector<double> m(psi.size());
  const double h = grid.spacing();
  for (std::size_t i = 0; i < psi.size(); ++i) m[i] = psi[i] * h;
  return m;
}

InvariantDensity invariant_density(const BandedOperator& generator, const Grid1D& grid) {
  check_size(generator, grid);
  const std::size_t n = grid.size();
  const std::size_t o = grid.origin_index();

  BandedOperator M = generator.transpose();
  M.sub[o] = 0.0;
  M.diag[o] = 1.0;
  M.super[o] = 0.0;
  std::vector<double> rhs(n, 0.0);
  rhs[o] = 1.0;
  // The pinned row splits the system into two column-dominant blocks, for
  // which elimination without pivoting is stable.
  std::vector<double> psi = solve_tridiagonal(M.sub, M.diag, M.super, rhs);

  double total = 0.0;
  for (double& p : psi) {
    if (p < 0.0) p = 0.0;  // round-off only; the exact solution is positive
    total += p;
  }
  const double h = grid.spacing();
  for (double& p : psi) p /= total * h;

  const auto outer = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kOuterFraction * n)));
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < outer; ++i) {
    left += psi[i] * h;
    right += psi[n - 1 - i] * h;
  }
  if (left > kTransienceMass || right > kTransienceMass) {
    throw Error(Errc::TransienceDetected, "mass " + std::to_string(std::max(left, right)) +
                                              " accumulates at the reflecting wall");
  }
  return InvariantDensity{grid, std::move(psi)};
}

std::vector<double> cost_vector(const DiffusionModel& model, const Policy& policy) {
  const Grid1D& grid = policy.grid();
  std::vector<double> c(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) c[i] = model.cost(grid.x(i), policy[i]);
  return c;
}

double average_cost(std::span<const double> cost, const InvariantDensity& density) {
  if (cost.size() != density.psi.size()) {
    throw Error(Errc::PolicyLengthMismatch, "cost vector does not match the density");
  }
  double sum = 0.0;
  double comp = 0.0;  // Neumaier compensation
  const double h = density.grid.spacing();
  for (std::size_t i = 0; i < cost.size(); ++i) {
    const double term = cost[i] * density.psi[i] * h;
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double average_cost(const DiffusionModel& model, const Policy& policy, const InvariantDensity& density) {
  return average_cost(cost_vector(model, policy), density);
}

ValueFunction poisson_value(const BandedOperator& generator, const Grid1D& grid, std::span<const double> cost,
                            double beta) {
  check_size(generator, grid);
  if (cost.size() != grid.size()) throw Error(Errc::PolicyLengthMismatch, "cost vector does not match the grid");

  const InvariantDensity density = invariant_density(generator, grid);
  const double mismatch = std::abs(beta - average_cost(cost, density));
  if (mismatch > kConsistencyTol) {
    throw Error(Errc::InconsistentSystem,
                "beta differs from the discrete average cost by " + std::to_string(mismatch));
  }

  const std::size_t n = grid.size();
  const std::size_t o = grid.origin_index();
  std::vector<double> sub = generator.sub, diag = generator.diag, super = generator.super;
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = beta - cost[i];
  sub[o] = 0.0;
  diag[o] = 1.0;
  super[o] = 0.0;
  rhs[o] = 0.0;
  std::vector<double> v = solve_tridiagonal(sub, diag, super, rhs);
  v[o] = 0.0;
  return ValueFunction{grid, std::move(v), true};
}

ValueFunction flux_integrated_value(const BandedOperator& generator, const Grid1D& grid,
                                    std::span<const double> cost, double rho) {
  check_size(generator, grid);
  const std::size_t n = grid.size();
  if (cost.size() != n) throw Error(Errc::PolicyLengthMismatch, "cost vector does not match the grid");

  // Rows 0..n-2 determine the increments d_{i+1} = V_{i+1} - V_i one at a time:
  //   super_i d_{i+1} - sub_i d_i = rho - c_i   (with d_0 = 0 at the wall).
  std::vector<double> v(n, 0.0);
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double up = generator.super[i];
    if (!(up > 0.0)) throw Error(Errc::SingularSystem, "zero upward rate at row " + std::to_string(i));
    d = (rho - cost[i] + (i > 0 ? generator.sub[i] * d : 0.0)) / up;
    v[i + 1] = v[i] + d;
  }
  const double shift = v[grid.origin_index()];
  for (double& x : v) x -= shift;
  v[grid.origin_index()] = 0.0;
  return ValueFunction{grid, std::move(v), true};
}

ExitFunctional exit_functional(const BandedOperator& generator, const Grid1D& grid, std::span<const double> cost,
                               double r, double rho) {
  check_size(generator, grid);
  const double L = grid.half_width();
  if (!(r > 0.0) || !(r < L)) {
    throw Error(Errc::InvalidRadius, "inner radius must lie in (0, L), got " + std::to_string(r));
  }
  const std::size_t n = grid.size();
  const std::size_t o = grid.origin_index();
  auto k = static_cast<std::size_t>(std::llround(r / grid.spacing()));
  k = std::clamp<std::size_t>(k, 1, o - 1);

  ExitFunctional out{grid, grid.x(o + k), o - k, o + k, std::vector<double>(n, 0.0)};

  // Right exterior: nodes o+k+1 .. n-1; Dirichlet zero at o+k.
  {
    const std::size_t lo = o + k + 1;
    const std::size_t m = n - lo;
    std::vector<double> sub(m), diag(m), super(m), rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i = lo + j;
      sub[j] = j == 0 ? 0.0 : -generator.sub[i];
      diag[j] = -generator.diag[i];
      super[j] = -generator.super[i];
      rhs[j] = cost[i] - rho;
    }
    const auto z = solve_tridiagonal(sub, diag, super, rhs);
    std::copy(z.begin(), z.end(), out.values.begin() + static_cast<std::ptrdiff_t>(lo));
  }
  // Left exterior: nodes 0 .. o-k-1; Dirichlet zero at o-k.
  {
    const std::size_t m = o - k;
    std::vector<double> sub(m), diag(m), super(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      sub[i] = -generator.sub[i];
      diag[i] = -generator.diag[i];
      super[i] = i + 1 == m ? 0.0 : -generator.super[i];
      rhs[i] = cost[i] - rho;
    }
    const auto z = solve_tridiagonal(sub, diag, super, rhs);
    std::copy(z.begin(), z.end(), out.values.begin());
  }
  return out;
}

ExitFunctional exit_functional(const DiffusionModel& model, const Policy& policy, double r, double rho) {
  return exit_functional(assemble_policy_generator(model, policy.grid(), policy), policy.grid(),
                         cost_vector(model, policy), r, rho);
}

}  // namespace ergocheck
