#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dwlab/lattice.hpp"
#include "dwlab/model.hpp"

// Static kink construction: analytic seed profiles, the stochastic
// accept-if-energy-decreases relaxation, and a deterministic gradient-flow
// relaxation used as polish and cross-check.  Grid endpoints are pinned at
// the seed's vacuum values throughout.

namespace dwlab {

enum class SeedKind { kink, antikink, psi_plus, psi_minus };

// kink/antikink: phi = +-tanh(sqrt(2) x), psi = 0.
// psi_plus/psi_minus: kink phi seeded with psi = +-0.5 sech(sqrt(2) x).
// Endpoint values are snapped to the exact vacua so pinning is exact.
FieldState initial_kink_guess(const Grid& g, SeedKind kind);

// phi = 2/(1+x^2) - 1, psi = x/(1+x^2): a kink-antikink pair winding around
// the origin of field space.  The algebraic tails are snapped to the (-1, 0)
// vacuum at the two endpoints.
FieldState molecule_guess(const Grid& g);

enum class RelaxMethod { stochastic, gradient_flow };
enum class RelaxStatus { converged, iteration_limit, diverged };

struct StaticProfile {
  FieldState state{Grid{0.0, 1.0, 8}};  // zero time derivatives
  double energy = 0.0;
  FieldPoint left_vacuum, right_vacuum;
  RelaxMethod method = RelaxMethod::stochastic;
  long iterations = 0;
};

struct RelaxationSchedule {
  double initial_amplitude = 0.1;
  double amplitude_decay = 0.5;
  long trials_per_stage = 0;  // 0 means 10 * n
  int max_stages = 40;
  double convergence_tol = 1e-8;
  std::uint64_t rng_seed = 1;
};

struct RelaxResult {
  StaticProfile profile;  // best so far even when not converged
  RelaxStatus status = RelaxStatus::converged;
  std::vector<double> energy_history;  // stochastic: per stage; flow: per step
  std::string message;
};

// Local Gaussian bump proposals (half-width 3 dx, one field, one random
// center, amplitude uniform in [-a, a]), accepted only when the total
// energy decreases.  Bitwise deterministic for a fixed seed.
RelaxResult relax_stochastic(const FieldState& initial, const ModelParams& m,
                             const RelaxationSchedule& sched);

// Explicit Euler descent on -dE/d(phi, psi); step must stay below dx^2/2.
// Stops when the max pointwise update falls below tol.
RelaxResult relax_gradient_flow(const FieldState& initial, const ModelParams& m,
                                double step, double tol, long max_iters);

// Max residual of the discrete static equations phi_xx = dV/dphi,
// psi_xx = dV/dpsi over interior points (3-point second derivative).
double static_residual_max(const FieldState& s, const ModelParams& m);

// Builds the profile record; requires zero time derivatives and exact
// vacuum endpoints.
StaticProfile make_static_profile(const FieldState& s, const ModelParams& m,
                                  RelaxMethod method, long iterations);

// x -> -x of a profile on a symmetric domain: kink <-> antikink with the
// same psi branch.
StaticProfile mirror_profile(const StaticProfile& p);

}  // namespace dwlab
