#include "dwlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwlab {

ModelParams::ModelParams(double lambda_in) : lambda(lambda_in) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw std::invalid_argument("ModelParams: lambda must be finite and >= 0");
}

double potential(const FieldPoint& p, const ModelParams& m) {
  const double r = p.phi * p.phi + p.psi * p.psi - 1.0;
  return r * r + 0.5 * m.lambda * p.psi * p.psi;
}

FieldPoint grad_potential(const FieldPoint& p, const ModelParams& m) {
  const double r = p.phi * p.phi + p.psi * p.psi - 1.0;
  return {4.0 * p.phi * r, 4.0 * p.psi * r + m.lambda * p.psi};
}

Hessian2 hessian(const FieldPoint& p, const ModelParams& m) {
  const double r = p.phi * p.phi + p.psi * p.psi - 1.0;
  Hessian2 h;
  h.dphi2 = 4.0 * r + 8.0 * p.phi * p.phi;
  h.dphi_dpsi = 8.0 * p.phi * p.psi;
  h.dpsi2 = 4.0 * r + 8.0 * p.psi * p.psi + m.lambda;
  return h;
}

std::pair<double, double> Hessian2::eigenvalues() const {
  const double mean = 0.5 * (dphi2 + dpsi2);
  const double disc = std::hypot(0.5 * (dphi2 - dpsi2), dphi_dpsi);
  return {mean - disc, mean + disc};
}

std::pair<double, double> vacuum_masses(const ModelParams& m) {
  return {8.0, m.lambda};
}

namespace {

CriticalPoint classify_point(const FieldPoint& loc, const ModelParams& m) {
  CriticalPoint cp;
  cp.location = loc;
  cp.value = potential(loc, m);
  const auto [e1, e2] = hessian(loc, m).eigenvalues();
  const double scale = std::max({std::fabs(e1), std::fabs(e2), 1.0});
  const double tol = 1e-12 * scale;
  const bool z1 = std::fabs(e1) <= tol, z2 = std::fabs(e2) <= tol;
  cp.degenerate = z1 || z2;
  const int neg = (!z1 && e1 < 0.0) + (!z2 && e2 < 0.0);
  const int pos = (!z1 && e1 > 0.0) + (!z2 && e2 > 0.0);
  if (neg > 0 && pos > 0)
    cp.kind = ExtremumKind::saddle;
  else if (neg > 0)
    cp.kind = ExtremumKind::local_maximum;
  else
    cp.kind = ExtremumKind::minimum;
  return cp;
}

}  // namespace

std::vector<CriticalPoint> classify_extrema(const ModelParams& m) {
  std::vector<CriticalPoint> out;
  out.push_back(classify_point({-1.0, 0.0}, m));
  out.push_back(classify_point({1.0, 0.0}, m));
  out.push_back(classify_point({0.0, 0.0}, m));
  // On the psi axis grad = (0, psi (4 (psi^2 - 1) + lambda)), stationary at
  // psi^2 = 1 - lambda/4 while that is positive.
  if (m.lambda < 4.0) {
    const double s = std::sqrt(1.0 - 0.25 * m.lambda);
    out.push_back(classify_point({0.0, -s}, m));
    out.push_back(classify_point({0.0, s}, m));
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.location.phi != b.location.phi) return a.location.phi < b.location.phi;
    return a.location.psi < b.location.psi;
  });
  return out;
}

}  // namespace dwlab
