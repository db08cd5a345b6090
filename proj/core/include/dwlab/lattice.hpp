#pragma once

#include <vector>

#include "dwlab/model.hpp"

// Uniform 1+1D lattice storage and the grid diagnostics: energy density,
// topological charge and current, Noether charge, static first integral
// and the PCAC-like divergence residual.  Spatial derivatives are
// second-order central stencils with second-order one-sided stencils at
// the two boundary points; integrals are trapezoidal.

namespace dwlab {

struct Grid {
  double x_min;
  double x_max;
  int n;

  Grid(double x0, double x1, int npts);
  double dx() const { return (x_max - x_min) / (n - 1); }
  // Convex-combination form so symmetric domains give bitwise symmetric
  // coordinates: x(i) == -x(n-1-i) when x_min == -x_max.  Endpoints are
  // returned exactly so serialized grids reconstruct bit-for-bit.
  double x(int i) const {
    if (i == 0) return x_min;
    if (i == n - 1) return x_max;
    return ((n - 1 - i) * x_min + i * x_max) / (n - 1);
  }
  bool operator==(const Grid& o) const {
    return x_min == o.x_min && x_max == o.x_max && n == o.n;
  }
};

struct FieldState {
  Grid grid;
  std::vector<double> phi, psi, phi_dot, psi_dot;
  double time = 0.0;

  // Starts in the (phi_vac, 0) vacuum at rest.
  explicit FieldState(const Grid& g, double phi_vac = 1.0);
  bool all_finite() const;
};

// d/dx with 3-point one-sided ends, all O(dx^2).
std::vector<double> spatial_gradient(const std::vector<double>& f, double dx);
double trapezoid(const std::vector<double>& f, double dx);

// H = phi_dot^2/2 + psi_dot^2/2 + phi_x^2/2 + psi_x^2/2 + V.
std::vector<double> energy_density(const FieldState& s, const ModelParams& m);
double total_energy(const FieldState& s, const ModelParams& m);

// Q = (phi(x_max) - phi(x_min)) / 2; meaningful when the boundary is
// vacuum-flat (check boundary_vacuum_flat).
double topological_charge(const FieldState& s);
// J^0 = phi_x / 2; trapezoid-integrates back to Q.
std::vector<double> charge_density(const FieldState& s);
bool boundary_vacuum_flat(const FieldState& s, double tol = 1e-6);

// Noether current of the lambda = 0 symmetry, convention
//   J^0 = 2 (psi phi_dot - phi psi_dot),  J^1 = 2 (phi psi_x - psi phi_x),
// which satisfies d_t J^0 + d_x J^1 = 2 lambda phi psi on shell.
std::vector<double> noether_charge_density(const FieldState& s);
std::vector<double> noether_flux(const FieldState& s);
double noether_charge(const FieldState& s);

// phi_x^2/2 + psi_x^2/2 - V, the conserved quantity of static solutions
// (zero for localized ones); time derivatives are ignored.
std::vector<double> first_integral_deviation(const FieldState& s, const ModelParams& m);

// T^{01} = phi_dot phi_x + psi_dot psi_x, extra diagnostic.
std::vector<double> momentum_density(const FieldState& s);

// |d_t J^0 + d_x J^1 - 2 lambda phi psi| from three consecutive states a
// time step dt apart; endpoints carry the adjacent interior value.
std::vector<double> pcac_residual(const FieldState& prev, const FieldState& cur,
                                  const FieldState& next, const ModelParams& m,
                                  double dt);

// x -> -x (arrays reversed); requires a symmetric domain.
FieldState mirror_x(const FieldState& s);

struct DiagnosticsSample {
  double time = 0.0;
  double total_energy = 0.0;
  double topological_charge = 0.0;
  double noether_charge = 0.0;
  double max_first_integral_deviation = 0.0;
  double max_pcac_residual = 0.0;
};

}  // namespace dwlab
