// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/analytic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <string>

#include "ergocheck/discretize.hpp"
#include "ergocheck/error.hpp"

namespace ergocheck::analytic {

namespace {

constexpr double kOneThird = 1.0 / 3.0;
constexpr unsigned kMaxDepth = 15;
// Relative accuracy requested from the integrator. Asking for less drives the
// Kronrod estimate into round-off and bisection to full depth. Estimates below
// this fraction of the L1 norm are accepted even when they exceed an absolute
// quad_tol, since V' reaches 1e5 near the edge of typical grids.
constexpr double kInnerRelTol = 1e-12;
constexpr double kTailCut = 40.0;

void check_rho(double rho) {
  if (!(rho >= kOneThird - 1e-12) || !(rho < 1.0)) {
    throw Error(Errc::DomainError, "rho must lie in [1/3, 1), got " + std::to_string(rho));
  }
}

// q = exp(xi) = (3/2)(1 - rho), clipped to 1 so that xi <= 0 survives the
// rounding of 1/3.
double exp_xi(double rho) { return std::min(1.0, 1.5 * (1.0 - rho)); }

template <class F>
double integrate(F f, double a, double b, double quad_tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  // A single rule first: on short cells the Kronrod estimate sits at its
  // round-off floor, and bisection would only add up copies of that floor.
  double value = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (std::isfinite(value) && err <= std::max(quad_tol, kInnerRelTol * l1)) return value;
  value = GK::integrate(f, a, b, kMaxDepth, kInnerRelTol, &err, &l1);
  if (!std::isfinite(value) || err > std::max(quad_tol, kInnerRelTol * l1)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "on [%.17g, %.17g] error estimate %.3g exceeds tolerance %.3g", a, b, err,
                  std::max(quad_tol, kInnerRelTol * l1));
    throw Error(Errc::QuadratureFailure, buf);
  }
  return value;
}

// Integrates over [a, b] with the kinks of the integrand (xi and 0) as breakpoints.
template <class F>
double integrate_pieces(F f, double a, double b, double xi_value, double quad_tol) {
  const double sign = a <= b ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double k : {xi_value, 0.0}) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], quad_tol);
  return sign * total;
}

}  // namespace

double xi(double rho) {
  check_rho(rho);
  return std::log(exp_xi(rho));
}

double psi_rho(double rho, double x) { return std::exp(-2.0 * std::abs(x - xi(rho))); }

double w_rho(double rho, double x) {
  const double d = x - xi(rho);
  if (std::abs(d) <= 1e-12) return 0.0;
  return d > 0.0 ? -1.0 : 1.0;
}

double inner_integral(double rho, double y) {
  const double s = xi(rho);
  const double q = std::exp(s);
  const double k = rho - 1.0;
  if (y <= s) {
    // z < xi <= 0: integrand k e^{2(z-xi)} + e^{3z - 2xi}
    return 0.5 * k * std::exp(2.0 * (y - s)) + std::exp(3.0 * y - 2.0 * s) / 3.0;
  }
  // Left piece up to xi.
  double j = 0.5 * k + q / 3.0;
  // xi < z < 0: k e^{2(xi-z)} + e^{2xi - z}
  const double m = std::min(y, 0.0);
  j += 0.5 * k * (1.0 - std::exp(2.0 * (s - m))) + (q - std::exp(2.0 * s - m));
  if (y > 0.0) {
    // z > 0: k e^{2(xi-z)} + e^{2xi - 3z}. Accumulate as total minus the tail
    // beyond y so the exponentially small remainder keeps its precision.
    const double q2 = q * q;
    const double total = j + 0.5 * k * q2 + q2 / 3.0;
    const double tail = 0.5 * k * q2 * std::exp(-2.0 * y) + q2 * std::exp(-3.0 * y) / 3.0;
    j = total - tail;
  }
  return j;
}

double v_rho_prime(double rho, double x) {
  const double s = xi(rho);
  return 2.0 * std::exp(2.0 * std::abs(x - s)) * inner_integral(rho, x);
}

double v_rho(double rho, double x, double quad_tol) { return v_rho_increment(rho, 0.0, x, quad_tol); }

double v_rho_increment(double rho, double a, double b, double quad_tol) {
  const double s = xi(rho);
  return integrate_pieces([rho](double y) { return v_rho_prime(rho, y); }, a, b, s, quad_tol);
}

double beta_quad(double rho, double quad_tol) {
  const double s = xi(rho);
  auto integrand = [s](double x) { return (1.0 - std::exp(-std::abs(x))) * std::exp(-2.0 * std::abs(x - s)); };
  // The density decays like exp(-2|x - xi|); beyond 40 units the tail is
  // below 1e-34 and is dropped.
  double total = integrate(integrand, s - kTailCut, s, quad_tol);
  total += integrate(integrand, s, 0.0, quad_tol);
  total += integrate(integrand, 0.0, kTailCut, quad_tol);
  return total;
}

double beta_formula(double rho) { return rho - 9.0 / 8.0 * (1.0 - rho) * (3.0 * rho - 1.0); }

std::vector<SpuriousFamilyPoint> family_sweep(std::span<const double> rhos, double quad_tol) {
  std::vector<SpuriousFamilyPoint> out;
  out.reserve(rhos.size());
  for (double rho : rhos) {
    const double b = beta_quad(rho, quad_tol);
    out.push_back({rho, xi(rho), b, beta_formula(rho), rho - b});
  }
  return out;
}

Policy w_rho_policy(const Grid1D& grid, const ControlSet& controls, double rho) {
  check_rho(rho);
  return Policy::from_feedback(grid, controls, [rho](double x) { return w_rho(rho, x); });
}

std::vector<double> sample_v_rho(const Grid1D& grid, double rho, double quad_tol) {
  const double s = xi(rho);
  const std::size_t n = grid.size();
  const std::size_t o = grid.origin_index();
  auto f = [rho](double y) { return v_rho_prime(rho, y); };
  std::vector<double> v(n, 0.0);
  for (std::size_t i = o + 1; i < n; ++i) {
    v[i] = v[i - 1] + integrate_pieces(f, grid.x(i - 1), grid.x(i), s, quad_tol);
  }
  for (std::size_t i = o; i-- > 0;) {
    v[i] = v[i + 1] + integrate_pieces(f, grid.x(i + 1), grid.x(i), s, quad_tol);
  }
  return v;
}

ValueFunction grid_v_rho(const DiffusionModel& model, const Grid1D& grid, double rho) {
  const Policy w = w_rho_policy(grid, model.controls, rho);
  return flux_integrated_value(assemble_policy_generator(model, grid, w), grid, cost_vector(model, w), rho);
}

}  // namespace ergocheck::analytic
