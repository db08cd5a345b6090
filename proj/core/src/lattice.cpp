#include "dwlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwlab {

Grid::Grid(double x0, double x1, int npts) : x_min(x0), x_max(x1), n(npts) {
  if (!std::isfinite(x0) || !std::isfinite(x1) || x0 >= x1)
    throw std::invalid_argument("Grid: require finite x_min < x_max");
  if (npts < 8) throw std::invalid_argument("Grid: require n >= 8");
}

FieldState::FieldState(const Grid& g, double phi_vac)
    : grid(g),
      phi(g.n, phi_vac),
      psi(g.n, 0.0),
      phi_dot(g.n, 0.0),
      psi_dot(g.n, 0.0) {}

bool FieldState::all_finite() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return ok(phi) && ok(psi) && ok(phi_dot) && ok(psi_dot) && std::isfinite(time);
}

std::vector<double> spatial_gradient(const std::vector<double>& f, double dx) {
  const int n = static_cast<int>(f.size());
  if (n < 3) throw std::invalid_argument("spatial_gradient: need at least 3 points");
  std::vector<double> g(n);
  const double inv2dx = 1.0 / (2.0 * dx);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
  for (int i = 1; i < n - 1; ++i) g[i] = (f[i + 1] - f[i - 1]) * inv2dx;
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2dx;
  return g;
}

double trapezoid(const std::vector<double>& f, double dx) {
  const int n = static_cast<int>(f.size());
  double acc = 0.5 * (f[0] + f[n - 1]);
  for (int i = 1; i < n - 1; ++i) acc += f[i];
  return acc * dx;
}

std::vector<double> energy_density(const FieldState& s, const ModelParams& m) {
  const auto phix = spatial_gradient(s.phi, s.grid.dx());
  const auto psix = spatial_gradient(s.psi, s.grid.dx());
  std::vector<double> h(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i) {
    h[i] = 0.5 * (s.phi_dot[i] * s.phi_dot[i] + s.psi_dot[i] * s.psi_dot[i] +
                  phix[i] * phix[i] + psix[i] * psix[i]) +
           potential({s.phi[i], s.psi[i]}, m);
  }
  return h;
}

double total_energy(const FieldState& s, const ModelParams& m) {
  return trapezoid(energy_density(s, m), s.grid.dx());
}

double topological_charge(const FieldState& s) {
  return 0.5 * (s.phi[s.grid.n - 1] - s.phi[0]);
}

std::vector<double> charge_density(const FieldState& s) {
  auto j = spatial_gradient(s.phi, s.grid.dx());
  for (double& v : j) v *= 0.5;
  return j;
}

bool boundary_vacuum_flat(const FieldState& s, double tol) {
  const auto phix = spatial_gradient(s.phi, s.grid.dx());
  const auto psix = spatial_gradient(s.psi, s.grid.dx());
  const int n = s.grid.n;
  return std::fabs(phix[0]) < tol && std::fabs(phix[n - 1]) < tol &&
         std::fabs(psix[0]) < tol && std::fabs(psix[n - 1]) < tol;
}

std::vector<double> noether_charge_density(const FieldState& s) {
  std::vector<double> j(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i)
    j[i] = 2.0 * (s.psi[i] * s.phi_dot[i] - s.phi[i] * s.psi_dot[i]);
  return j;
}

std::vector<double> noether_flux(const FieldState& s) {
  const auto phix = spatial_gradient(s.phi, s.grid.dx());
  const auto psix = spatial_gradient(s.psi, s.grid.dx());
  std::vector<double> j(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i)
    j[i] = 2.0 * (s.phi[i] * psix[i] - s.psi[i] * phix[i]);
  return j;
}

double noether_charge(const FieldState& s) {
  return trapezoid(noether_charge_density(s), s.grid.dx());
}

std::vector<double> first_integral_deviation(const FieldState& s, const ModelParams& m) {
  const auto phix = spatial_gradient(s.phi, s.grid.dx());
  const auto psix = spatial_gradient(s.psi, s.grid.dx());
  std::vector<double> c(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i)
    c[i] = 0.5 * (phix[i] * phix[i] + psix[i] * psix[i]) -
           potential({s.phi[i], s.psi[i]}, m);
  return c;
}

std::vector<double> momentum_density(const FieldState& s) {
  const auto phix = spatial_gradient(s.phi, s.grid.dx());
  const auto psix = spatial_gradient(s.psi, s.grid.dx());
  std::vector<double> t(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i)
    t[i] = s.phi_dot[i] * phix[i] + s.psi_dot[i] * psix[i];
  return t;
}

std::vector<double> pcac_residual(const FieldState& prev, const FieldState& cur,
                                  const FieldState& next, const ModelParams& m,
                                  double dt) {
  if (!(prev.grid == cur.grid) || !(cur.grid == next.grid))
    throw std::invalid_argument("pcac_residual: snapshots on different grids");
  if (!(dt > 0.0)) throw std::invalid_argument("pcac_residual: dt must be positive");
  const int n = cur.grid.n;
  const auto j0p = noether_charge_density(prev);
  const auto j0n = noether_charge_density(next);
  const auto j1 = noether_flux(cur);
  const double inv2dt = 1.0 / (2.0 * dt);
  const double inv2dx = 1.0 / (2.0 * cur.grid.dx());
  std::vector<double> r(n);
  for (int i = 1; i < n - 1; ++i) {
    const double dj0 = (j0n[i] - j0p[i]) * inv2dt;
    const double dj1 = (j1[i + 1] - j1[i - 1]) * inv2dx;
    r[i] = std::fabs(dj0 + dj1 - 2.0 * m.lambda * cur.phi[i] * cur.psi[i]);
  }
  r[0] = r[1];
  r[n - 1] = r[n - 2];
  return r;
}

FieldState mirror_x(const FieldState& s) {
  if (std::fabs(s.grid.x_min + s.grid.x_max) > 1e-12 * (s.grid.x_max - s.grid.x_min))
    throw std::invalid_argument("mirror_x: domain must be symmetric about 0");
  FieldState out = s;
  std::reverse(out.phi.begin(), out.phi.end());
  std::reverse(out.psi.begin(), out.psi.end());
  std::reverse(out.phi_dot.begin(), out.phi_dot.end());
  std::reverse(out.psi_dot.begin(), out.psi_dot.end());
  return out;
}

}  // namespace dwlab
