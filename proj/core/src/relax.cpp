#include "dwlab/relax.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dwlab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Narrowest half-domain for which tanh(sqrt(2) x) reaches its vacuum to 1e-6.
void require_wide_enough(const Grid& g) {
  const double reach = std::min(-g.x_min, g.x_max);
  if (std::tanh(kSqrt2 * reach) < 1.0 - 1e-6)
    throw std::invalid_argument(
        "initial_kink_guess: grid too narrow for the kink tails (need |x| >= 5.13)");
}

}  // namespace

FieldState initial_kink_guess(const Grid& g, SeedKind kind) {
  require_wide_enough(g);
  FieldState s(g);
  const double sign = (kind == SeedKind::antikink) ? -1.0 : 1.0;
  for (int i = 0; i < g.n; ++i) s.phi[i] = sign * std::tanh(kSqrt2 * g.x(i));
  if (kind == SeedKind::psi_plus || kind == SeedKind::psi_minus) {
    const double a = (kind == SeedKind::psi_plus) ? 0.5 : -0.5;
    for (int i = 0; i < g.n; ++i) s.psi[i] = a / std::cosh(kSqrt2 * g.x(i));
  }
  // Exact vacuum endpoints, so pinning preserves them bitwise.
  s.phi[0] = -sign;
  s.phi[g.n - 1] = sign;
  s.psi[0] = s.psi[g.n - 1] = 0.0;
  return s;
}

FieldState molecule_guess(const Grid& g) {
  if (std::fabs(g.x_min + g.x_max) > 1e-9 * (g.x_max - g.x_min))
    throw std::invalid_argument("molecule_guess: grid must be centered on 0");
  FieldState s(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    const double d = 1.0 + x * x;
    s.phi[i] = 2.0 / d - 1.0;
    s.psi[i] = x / d;
  }
  // The guess decays only algebraically; pin the endpoints at the vacuum.
  s.phi[0] = s.phi[g.n - 1] = -1.0;
  s.psi[0] = s.psi[g.n - 1] = 0.0;
  return s;
}

namespace {

// Trapezoid-weighted energy over index window [a, b] with the same stencils
// as energy_density, so windowed differences reproduce total-energy changes.
double window_energy(const FieldState& s, const ModelParams& m, int a, int b) {
  const int n = s.grid.n;
  const double dx = s.grid.dx();
  const double inv2dx = 1.0 / (2.0 * dx);
  double acc = 0.0;
  for (int i = a; i <= b; ++i) {
    double px, qx;
    if (i == 0) {
      px = (-3.0 * s.phi[0] + 4.0 * s.phi[1] - s.phi[2]) * inv2dx;
      qx = (-3.0 * s.psi[0] + 4.0 * s.psi[1] - s.psi[2]) * inv2dx;
    } else if (i == n - 1) {
      px = (3.0 * s.phi[n - 1] - 4.0 * s.phi[n - 2] + s.phi[n - 3]) * inv2dx;
      qx = (3.0 * s.psi[n - 1] - 4.0 * s.psi[n - 2] + s.psi[n - 3]) * inv2dx;
    } else {
      px = (s.phi[i + 1] - s.phi[i - 1]) * inv2dx;
      qx = (s.psi[i + 1] - s.psi[i - 1]) * inv2dx;
    }
    const double h = 0.5 * (s.phi_dot[i] * s.phi_dot[i] + s.psi_dot[i] * s.psi_dot[i] +
                            px * px + qx * qx) +
                     potential({s.phi[i], s.psi[i]}, m);
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * h;
  }
  return acc * dx;
}

void validate_schedule(const RelaxationSchedule& sched) {
  if (!(sched.initial_amplitude > 0.0))
    throw std::invalid_argument("relax_stochastic: initial_amplitude must be > 0");
  if (!(sched.amplitude_decay > 0.0 && sched.amplitude_decay < 1.0))
    throw std::invalid_argument("relax_stochastic: amplitude_decay must be in (0, 1)");
  if (sched.max_stages < 1)
    throw std::invalid_argument("relax_stochastic: max_stages must be >= 1");
  if (!(sched.convergence_tol >= 0.0))
    throw std::invalid_argument("relax_stochastic: convergence_tol must be >= 0");
  if (sched.trials_per_stage < 0)
    throw std::invalid_argument("relax_stochastic: trials_per_stage must be >= 0");
}

}  // namespace

RelaxResult relax_stochastic(const FieldState& initial, const ModelParams& m,
                             const RelaxationSchedule& sched) {
  validate_schedule(sched);
  if (!initial.all_finite())
    throw std::invalid_argument("relax_stochastic: initial state has non-finite entries");

  FieldState s = initial;
  std::fill(s.phi_dot.begin(), s.phi_dot.end(), 0.0);
  std::fill(s.psi_dot.begin(), s.psi_dot.end(), 0.0);

  const int n = s.grid.n;
  const long trials = sched.trials_per_stage > 0 ? sched.trials_per_stage : 10L * n;

  // Gaussian bump of half-width 3 dx; the sampled shape is grid independent.
  constexpr int kReach = 18;
  double shape[kReach + 1];
  for (int k = 0; k <= kReach; ++k) shape[k] = std::exp(-(k / 3.0) * (k / 3.0));

  std::mt19937_64 rng(sched.rng_seed);
  std::uniform_int_distribution<int> pick_field(0, 1);
  std::uniform_int_distribution<int> pick_center(1, n - 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  RelaxResult res;
  double energy = total_energy(s, m);
  res.energy_history.push_back(energy);

  double amplitude = sched.initial_amplitude;
  double saved[2 * kReach + 1];
  long trials_done = 0;
  RelaxStatus status = RelaxStatus::iteration_limit;
  double last_drop = 0.0;

  for (int stage = 0; stage < sched.max_stages; ++stage) {
    long accepted = 0;
    for (long t = 0; t < trials; ++t) {
      const int field = pick_field(rng);
      const int j = pick_center(rng);
      const double amp = amplitude * unit(rng);
      const int lo = std::max(1, j - kReach);
      const int hi = std::min(n - 2, j + kReach);
      const int wa = std::max(0, lo - 2);
      const int wb = std::min(n - 1, hi + 2);
      std::vector<double>& f = field == 0 ? s.phi : s.psi;
      const double before = window_energy(s, m, wa, wb);
      for (int i = lo; i <= hi; ++i) {
        saved[i - lo] = f[i];
        f[i] += amp * shape[std::abs(i - j)];
      }
      const double after = window_energy(s, m, wa, wb);
      const double de = after - before;
      if (de < 0.0) {
        energy += de;
        ++accepted;
      } else {
        for (int i = lo; i <= hi; ++i) f[i] = saved[i - lo];
      }
    }
    trials_done += trials;
    // Resync the cached energy; incremental updates only drift at rounding level.
    const double resynced = total_energy(s, m);
    last_drop = res.energy_history.back() - resynced;
    res.energy_history.push_back(resynced);
    energy = resynced;
    if (static_cast<double>(accepted) < 0.05 * static_cast<double>(trials))
      amplitude *= sched.amplitude_decay;
    if (last_drop < sched.convergence_tol) {
      status = RelaxStatus::converged;
      break;
    }
  }

  res.status = status;
  if (status == RelaxStatus::iteration_limit)
    res.message = "max_stages reached with last stage drop " + std::to_string(last_drop);
  res.profile = make_static_profile(s, m, RelaxMethod::stochastic, trials_done);
  return res;
}

RelaxResult relax_gradient_flow(const FieldState& initial, const ModelParams& m,
                                double step, double tol, long max_iters) {
  const double dx = initial.grid.dx();
  if (!(step > 0.0 && step < 0.5 * dx * dx))
    throw std::invalid_argument("relax_gradient_flow: step must be in (0, dx^2/2)");
  if (!(tol > 0.0)) throw std::invalid_argument("relax_gradient_flow: tol must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("relax_gradient_flow: max_iters must be >= 1");
  if (!initial.all_finite())
    throw std::invalid_argument("relax_gradient_flow: initial state has non-finite entries");

  FieldState s = initial;
  std::fill(s.phi_dot.begin(), s.phi_dot.end(), 0.0);
  std::fill(s.psi_dot.begin(), s.psi_dot.end(), 0.0);

  const int n = s.grid.n;
  const double invdx2 = 1.0 / (dx * dx);
  std::vector<double> phi_new(s.phi), psi_new(s.psi);

  // Link-based discrete energy: the update below is exact gradient descent
  // on THIS functional, so it must decrease monotonically; the divergence
  // guard is only sound against it, not against the centered-stencil
  // total_energy (the two differ by O(dx^2)).
  auto energy_of = [&](const FieldState& st) {
    double grad = 0.0, pot = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double dphi = st.phi[i + 1] - st.phi[i];
      const double dpsi = st.psi[i + 1] - st.psi[i];
      grad += dphi * dphi + dpsi * dpsi;
    }
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      pot += w * potential({st.phi[i], st.psi[i]}, m);
    }
    return 0.5 * grad / dx + pot * dx;
  };

  RelaxResult res;
  double energy = energy_of(s);
  res.energy_history.push_back(energy);
  RelaxStatus status = RelaxStatus::iteration_limit;
  long iters = 0;

  while (iters < max_iters) {
    double max_update = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      const double lap_phi = ((s.phi[i - 1] + s.phi[i + 1]) - 2.0 * s.phi[i]) * invdx2;
      const double lap_psi = ((s.psi[i - 1] + s.psi[i + 1]) - 2.0 * s.psi[i]) * invdx2;
      const FieldPoint g = grad_potential({s.phi[i], s.psi[i]}, m);
      const double du = step * (lap_phi - g.phi);
      const double dv = step * (lap_psi - g.psi);
      phi_new[i] = s.phi[i] + du;
      psi_new[i] = s.psi[i] + dv;
      max_update = std::max({max_update, std::fabs(du), std::fabs(dv)});
    }
    s.phi.swap(phi_new);
    s.psi.swap(psi_new);
    ++iters;

    const double e = energy_of(s);
    if (e > energy + 1e-12 * (1.0 + std::fabs(energy))) {
      s.phi.swap(phi_new);  // roll back to the last good state
      s.psi.swap(psi_new);
      status = RelaxStatus::diverged;
      res.message = "energy increased at iteration " + std::to_string(iters);
      break;
    }
    energy = e;
    res.energy_history.push_back(energy);
    if (max_update < tol) {
      status = RelaxStatus::converged;
      break;
    }
  }

  res.status = status;
  if (status == RelaxStatus::iteration_limit)
    res.message = "max_iters reached before updates fell below tol";
  res.profile = make_static_profile(s, m, RelaxMethod::gradient_flow, iters);
  return res;
}

double static_residual_max(const FieldState& s, const ModelParams& m) {
  const int n = s.grid.n;
  const double invdx2 = 1.0 / (s.grid.dx() * s.grid.dx());
  double worst = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    const double lap_phi = ((s.phi[i - 1] + s.phi[i + 1]) - 2.0 * s.phi[i]) * invdx2;
    const double lap_psi = ((s.psi[i - 1] + s.psi[i + 1]) - 2.0 * s.psi[i]) * invdx2;
    const FieldPoint g = grad_potential({s.phi[i], s.psi[i]}, m);
    worst = std::max({worst, std::fabs(lap_phi - g.phi), std::fabs(lap_psi - g.psi)});
  }
  return worst;
}

StaticProfile make_static_profile(const FieldState& s, const ModelParams& m,
                                  RelaxMethod method, long iterations) {
  const int n = s.grid.n;
  for (int i = 0; i < n; ++i)
    if (s.phi_dot[i] != 0.0 || s.psi_dot[i] != 0.0)
      throw std::invalid_argument("make_static_profile: time derivatives must be zero");
  auto vacuum_at = [&](int i) -> FieldPoint {
    if (std::fabs(std::fabs(s.phi[i]) - 1.0) > 1e-6 || std::fabs(s.psi[i]) > 1e-6)
      throw std::invalid_argument("make_static_profile: endpoint not at a vacuum");
    return {std::copysign(1.0, s.phi[i]), 0.0};
  };
  StaticProfile p;
  p.left_vacuum = vacuum_at(0);
  p.right_vacuum = vacuum_at(n - 1);
  p.state = s;
  p.energy = total_energy(s, m);
  p.method = method;
  p.iterations = iterations;
  return p;
}

StaticProfile mirror_profile(const StaticProfile& p) {
  StaticProfile out = p;
  out.state = mirror_x(p.state);
  out.left_vacuum = p.right_vacuum;
  out.right_vacuum = p.left_vacuum;
  return out;
}

}  // namespace dwlab
