// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ergocheck/grid.hpp"
#include "ergocheck/model.hpp"
#include "ergocheck/policy.hpp"
#include "ergocheck/valuedet.hpp"

/// Closed-form family of HJB solutions for the built-in example
/// (dX = U dt + dW, U in [-1,1], c = 1 - exp(-|x|)), indexed by
/// rho in [1/3, 1). Only rho = 1/3 is the optimal value; every other member
/// is a spurious solution.
namespace ergocheck::analytic {

inline constexpr double kDefaultQuadTol = 1e-10;

/// Switching point xi = log(3/2) + log(1 - rho). Throws DomainError outside [1/3, 1).
double xi(double rho);

/// Invariant density of the selector w_rho: exp(-2 |x - xi|).
double psi_rho(double rho, double x);

/// Selector w_rho(x) = -sgn(x - xi).
double w_rho(double rho, double x);

/// Inner integral J(y) = int_{-inf}^{y} exp(-2|z - xi|) (rho - c(z)) dz,
/// evaluated from its piecewise exponential antiderivative.
double inner_integral(double rho, double y);

/// V'(x) = 2 exp(2|x - xi|) J(x).
double v_rho_prime(double rho, double x);

/// V(x) - V(0) by adaptive Gauss-Kronrod quadrature of V'. The outer integral
/// taken from -infinity diverges (V' -> rho - 1 there), so the origin
/// normalization is built in. Throws QuadratureFailure when the error
/// estimate exceeds quad_tol.
double v_rho(double rho, double x, double quad_tol = kDefaultQuadTol);

/// V(b) - V(a) by quadrature of V' over [a, b]. Finite differences built from
/// these increments avoid the cancellation of differencing large values of V.
double v_rho_increment(double rho, double a, double b, double quad_tol = kDefaultQuadTol);

/// beta(w_rho) = int c(x) psi_rho(x) dx by adaptive quadrature.
double beta_quad(double rho, double quad_tol = kDefaultQuadTol);

/// The comparison expression rho - (9/8)(1 - rho)(3 rho - 1). It agrees with
/// the quadrature only at rho = 1/3 and rho -> 1; kept as a report column.
double beta_formula(double rho);

struct SpuriousFamilyPoint {
  double rho;
  double xi;
  double beta_quad;
  double beta_formula;
  double gap;  // rho - beta_quad
};

std::vector<SpuriousFamilyPoint> family_sweep(std::span<const double> rhos, double quad_tol = kDefaultQuadTol);

/// w_rho tabulated on the grid, snapped to the model's control set.
Policy w_rho_policy(const Grid1D& grid, const ControlSet& controls, double rho);

/// V_rho - V_rho(0) at every node, accumulated cell by cell by quadrature.
std::vector<double> sample_v_rho(const Grid1D& grid, double rho, double quad_tol = kDefaultQuadTol);

/// Grid counterpart of V_rho: the flux-integrated solution of
/// A_w V = rho - c under the tabulated selector w_rho.
ValueFunction grid_v_rho(const DiffusionModel& model, const Grid1D& grid, double rho);

}  // namespace ergocheck::analytic
