#pragma once

#include <string>
#include <vector>

#include "dwlab/lattice.hpp"
#include "dwlab/model.hpp"
#include "dwlab/relax.hpp"

// Explicit time evolution: Lorentz-boosted initial data, kink-antikink
// superposition, and a velocity-Verlet (leapfrog) integrator for
//   phi_tt = phi_xx - 4 phi (phi^2 + psi^2 - 1)
//   psi_tt = psi_xx - 4 psi (phi^2 + psi^2 - 1) - lambda psi
// with pinned (Dirichlet) boundaries and an optional absorbing sponge.

namespace dwlab {

enum class BoundaryKind { pinned_vacuum, sponge };

struct EvolveConfig {
  double dt = 0.004;
  double t_end = 60.0;
  BoundaryKind boundary = BoundaryKind::pinned_vacuum;
  double sponge_width = 5.0;
  double sponge_strength = 2.0;
  int snapshot_stride = 25;

  // CFL bound dt <= dx/2 plus basic sanity; throws on violation.
  void validate(const Grid& g) const;
};

// Samples the moving solution f(gamma (x - x0)) with d/dt = -v gamma f'
// at t = 0, cubic (Catmull-Rom) interpolation off the source grid and
// exact vacuum extension beyond it.  Throws if |v| >= 1 or the boosted
// profile does not reach vacuum at the target boundaries.
FieldState boost_profile(const StaticProfile& p, double v, double x0,
                         const Grid& target);

struct CollisionSetup {
  StaticProfile left, right;
  double x_left = -10.0, x_right = 10.0;
  double v_left = 0.6, v_right = -0.6;
};

// Distance between the crossings of the levels mid +- tanh(1) half-gap,
// i.e. sqrt(2) for the unboosted lambda = 0 kink.
double profile_width(const StaticProfile& p);

// Additive superposition phi_L + phi_R - phi_shared, psi_L + psi_R.
// Requires matching middle vacuum and separation >= 2x combined widths.
FieldState compose_collision(const CollisionSetup& setup, const Grid& grid);

// One velocity-Verlet step of size cfg.dt.
FieldState step(const FieldState& s, const ModelParams& m, const EvolveConfig& cfg);

struct Trajectory {
  std::vector<FieldState> snapshots;       // stride cfg.snapshot_stride, plus final
  std::vector<DiagnosticsSample> diagnostics;  // every step
  bool completed = true;
  std::string failure;
};

// Integrates to t_end recording snapshots and per-step diagnostics.  On
// non-finite fields it stops, keeps the last good state as the final
// snapshot and reports completed = false.
Trajectory run(const FieldState& initial, const ModelParams& m,
               const EvolveConfig& cfg);

}  // namespace dwlab
