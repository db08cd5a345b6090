#pragma once

#include <utility>
#include <vector>

// Field-space layer for the two-scalar model
//
//   V(phi, psi) = (phi^2 + psi^2 - 1)^2 + (lambda/2) psi^2
//
// lambda = 0 restores the global U(1) symmetry of Phi = phi + i psi,
// 0 < lambda < 4 leaves minima at (+-1, 0) plus a saddle pair on the psi
// axis, and lambda >= 4 removes the saddles so the psi = 0 dynamics is
// the plain phi^4 sector.

namespace dwlab {

struct ModelParams {
  double lambda;
  explicit ModelParams(double lambda_in);
};

struct FieldPoint {
  double phi = 0.0;
  double psi = 0.0;
};

// Independent entries of the symmetric 2x2 second-derivative matrix.
struct Hessian2 {
  double dphi2 = 0.0;
  double dphi_dpsi = 0.0;
  double dpsi2 = 0.0;
  std::pair<double, double> eigenvalues() const;  // ascending
};

enum class ExtremumKind { minimum, saddle, local_maximum };

struct CriticalPoint {
  FieldPoint location;
  ExtremumKind kind = ExtremumKind::minimum;
  double value = 0.0;       // V at the point
  bool degenerate = false;  // some Hessian eigenvalue vanishes
};

double potential(const FieldPoint& p, const ModelParams& m);
FieldPoint grad_potential(const FieldPoint& p, const ModelParams& m);
Hessian2 hessian(const FieldPoint& p, const ModelParams& m);

// (8, lambda): the Hessian diagonal at the vacua (+-1, 0), i.e. squared
// masses of the radial and psi excitations.
std::pair<double, double> vacuum_masses(const ModelParams& m);

// Every critical point of V, sorted by phi then psi.  Kinds follow the
// Hessian eigenvalue signs; a vanishing eigenvalue (lambda = 0 or 4) sets
// the degenerate flag instead of being guessed around.
std::vector<CriticalPoint> classify_extrema(const ModelParams& m);

}  // namespace dwlab
