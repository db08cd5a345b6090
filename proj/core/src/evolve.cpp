#include "dwlab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwlab {

void EvolveConfig::validate(const Grid& g) const {
  if (!(dt > 0.0)) throw std::invalid_argument("EvolveConfig: dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("EvolveConfig: t_end must be > 0");
  if (dt > 0.5 * g.dx())
    throw std::invalid_argument("EvolveConfig: CFL violation (dt > 0.5*dx)");
  if (snapshot_stride < 1)
    throw std::invalid_argument("EvolveConfig: snapshot_stride must be >= 1");
  if (boundary == BoundaryKind::sponge) {
    if (!(sponge_width > 0.0) || sponge_width >= 0.25 * (g.x_max - g.x_min))
      throw std::invalid_argument(
          "EvolveConfig: sponge_width must be in (0, (x_max-x_min)/4)");
    if (!(sponge_strength > 0.0))
      throw std::invalid_argument("EvolveConfig: sponge_strength must be > 0");
    if (sponge_strength * dt >= 1.0)
      throw std::invalid_argument("EvolveConfig: sponge_strength*dt must be < 1");
  }
}

namespace {

// Catmull-Rom on a uniform grid; clamps the stencil at the edges and snaps
// to node values when the sample point is numerically on a node.
double cubic_at(const std::vector<double>& f, const Grid& g, double u) {
  const int n = g.n;
  double t = (u - g.x_min) / g.dx();
  if (t <= 0.0) return f[0];
  if (t >= n - 1) return f[n - 1];
  int j = static_cast<int>(t);
  if (j > n - 2) j = n - 2;
  const double frac = t - j;
  if (frac < 1e-9) return f[j];
  if (frac > 1.0 - 1e-9) return f[j + 1];
  const double p0 = f[std::max(j - 1, 0)];
  const double p1 = f[j];
  const double p2 = f[j + 1];
  const double p3 = f[std::min(j + 2, n - 1)];
  return 0.5 * (2.0 * p1 + frac * ((p2 - p0) +
                frac * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                frac * ((3.0 * (p1 - p2) + p3 - p0)))));
}

}  // namespace

FieldState boost_profile(const StaticProfile& p, double v, double x0,
                         const Grid& target) {
  if (!(std::fabs(v) < 1.0))
    throw std::invalid_argument("boost_profile: require |v| < 1");
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  const Grid& gs = p.state.grid;
  const auto dphi = spatial_gradient(p.state.phi, gs.dx());
  const auto dpsi = spatial_gradient(p.state.psi, gs.dx());

  FieldState out(target);
  for (int i = 0; i < target.n; ++i) {
    const double u = gamma * (target.x(i) - x0);
    if (u <= gs.x_min) {
      out.phi[i] = p.left_vacuum.phi;
      out.psi[i] = p.left_vacuum.psi;
      out.phi_dot[i] = out.psi_dot[i] = 0.0;
    } else if (u >= gs.x_max) {
      out.phi[i] = p.right_vacuum.phi;
      out.psi[i] = p.right_vacuum.psi;
      out.phi_dot[i] = out.psi_dot[i] = 0.0;
    } else {
      out.phi[i] = cubic_at(p.state.phi, gs, u);
      out.psi[i] = cubic_at(p.state.psi, gs, u);
      out.phi_dot[i] = -v * gamma * cubic_at(dphi, gs, u);
      out.psi_dot[i] = -v * gamma * cubic_at(dpsi, gs, u);
    }
  }
  for (int i : {0, target.n - 1}) {
    if (std::fabs(std::fabs(out.phi[i]) - 1.0) > 1e-6 || std::fabs(out.psi[i]) > 1e-6 ||
        std::fabs(out.phi_dot[i]) > 1e-6 || std::fabs(out.psi_dot[i]) > 1e-6)
      throw std::invalid_argument(
          "boost_profile: boosted support is clipped by the grid boundary");
  }
  return out;
}

double profile_width(const StaticProfile& p) {
  const double mid = 0.5 * (p.left_vacuum.phi + p.right_vacuum.phi);
  const double hg = 0.5 * (p.right_vacuum.phi - p.left_vacuum.phi);
  if (hg == 0.0)
    throw std::invalid_argument("profile_width: profile has equal boundary vacua");
  const double level = std::tanh(1.0);
  const Grid& g = p.state.grid;
  auto crossing = [&](double target) {
    for (int i = 0; i + 1 < g.n; ++i) {
      const double a = (p.state.phi[i] - mid) / hg;
      const double b = (p.state.phi[i + 1] - mid) / hg;
      if ((a - target) * (b - target) <= 0.0 && a != b)
        return g.x(i) + g.dx() * (target - a) / (b - a);
    }
    throw std::invalid_argument("profile_width: level crossing not found");
  };
  return std::fabs(crossing(level) - crossing(-level));
}

FieldState compose_collision(const CollisionSetup& setup, const Grid& grid) {
  if (!(setup.x_left < setup.x_right))
    throw std::invalid_argument("compose_collision: require x_left < x_right");
  const FieldPoint mid_l = setup.left.right_vacuum;
  const FieldPoint mid_r = setup.right.left_vacuum;
  if (std::fabs(mid_l.phi - mid_r.phi) > 1e-9 || std::fabs(mid_l.psi - mid_r.psi) > 1e-9)
    throw std::invalid_argument(
        "compose_collision: profiles do not share the middle vacuum");
  const double widths = profile_width(setup.left) + profile_width(setup.right);
  if (setup.x_right - setup.x_left < 2.0 * widths)
    throw std::invalid_argument(
        "compose_collision: separation below twice the combined kink widths");

  const FieldState l = boost_profile(setup.left, setup.v_left, setup.x_left, grid);
  const FieldState r = boost_profile(setup.right, setup.v_right, setup.x_right, grid);
  FieldState out(grid);
  for (int i = 0; i < grid.n; ++i) {
    out.phi[i] = l.phi[i] + r.phi[i] - mid_l.phi;
    out.psi[i] = l.psi[i] + r.psi[i];
    out.phi_dot[i] = l.phi_dot[i] + r.phi_dot[i];
    out.psi_dot[i] = l.psi_dot[i] + r.psi_dot[i];
  }
  return out;
}

namespace {

// Velocity-Verlet with one force evaluation per step; endpoints stay fixed.
struct Stepper {
  const ModelParams m;
  const double dt;
  const double invdx2;
  std::vector<double> acc_phi, acc_psi, damp;
  bool sponged = false;

  Stepper(const FieldState& s, const ModelParams& mp, const EvolveConfig& cfg)
      : m(mp),
        dt(cfg.dt),
        invdx2(1.0 / (s.grid.dx() * s.grid.dx())),
        acc_phi(s.grid.n, 0.0),
        acc_psi(s.grid.n, 0.0) {
    if (cfg.boundary == BoundaryKind::sponge) {
      sponged = true;
      damp.assign(s.grid.n, 1.0);
      for (int i = 0; i < s.grid.n; ++i) {
        const double d = std::min(s.grid.x(i) - s.grid.x_min, s.grid.x_max - s.grid.x(i));
        if (d < cfg.sponge_width) {
          const double u = 1.0 - d / cfg.sponge_width;
          damp[i] = 1.0 - cfg.sponge_strength * u * u * dt;
        }
      }
    }
    force(s);
  }

  void force(const FieldState& s) {
    const int n = s.grid.n;
    for (int i = 1; i < n - 1; ++i) {
      const double r = s.phi[i] * s.phi[i] + s.psi[i] * s.psi[i] - 1.0;
      acc_phi[i] = ((s.phi[i - 1] + s.phi[i + 1]) - 2.0 * s.phi[i]) * invdx2 -
                   4.0 * s.phi[i] * r;
      acc_psi[i] = ((s.psi[i - 1] + s.psi[i + 1]) - 2.0 * s.psi[i]) * invdx2 -
                   4.0 * s.psi[i] * r - m.lambda * s.psi[i];
    }
  }

  // Returns false when the fields go non-finite or blow up.
  bool advance(FieldState& s) {
    const int n = s.grid.n;
    const double half = 0.5 * dt;
    double sumsq = 0.0;
    for (int i = 1; i < n - 1; ++i) {
      s.phi_dot[i] += half * acc_phi[i];
      s.psi_dot[i] += half * acc_psi[i];
      s.phi[i] += dt * s.phi_dot[i];
      s.psi[i] += dt * s.psi_dot[i];
      sumsq += s.phi[i] * s.phi[i] + s.psi[i] * s.psi[i];
    }
    if (!(sumsq < 1e12 * n)) return false;
    force(s);
    for (int i = 1; i < n - 1; ++i) {
      s.phi_dot[i] += half * acc_phi[i];
      s.psi_dot[i] += half * acc_psi[i];
    }
    if (sponged) {
      for (int i = 1; i < n - 1; ++i) {
        s.phi_dot[i] *= damp[i];
        s.psi_dot[i] *= damp[i];
      }
    }
    return true;
  }
};

DiagnosticsSample basic_diagnostics(const FieldState& s, const ModelParams& m) {
  DiagnosticsSample d;
  d.time = s.time;
  d.total_energy = total_energy(s, m);
  d.topological_charge = topological_charge(s);
  d.noether_charge = noether_charge(s);
  const auto fi = first_integral_deviation(s, m);
  double worst = 0.0;
  for (double v : fi) worst = std::max(worst, std::fabs(v));
  d.max_first_integral_deviation = worst;
  d.max_pcac_residual = 0.0;
  return d;
}

}  // namespace

FieldState step(const FieldState& s, const ModelParams& m, const EvolveConfig& cfg) {
  cfg.validate(s.grid);
  FieldState out = s;
  out.phi_dot[0] = out.psi_dot[0] = 0.0;
  out.phi_dot[s.grid.n - 1] = out.psi_dot[s.grid.n - 1] = 0.0;
  Stepper st(out, m, cfg);
  if (!st.advance(out)) throw std::runtime_error("step: fields went non-finite");
  out.time = s.time + cfg.dt;
  return out;
}

Trajectory run(const FieldState& initial, const ModelParams& m,
               const EvolveConfig& cfg) {
  cfg.validate(initial.grid);
  if (!initial.all_finite())
    throw std::invalid_argument("run: initial state has non-finite entries");

  FieldState cur = initial;
  const int n = cur.grid.n;
  cur.phi_dot[0] = cur.psi_dot[0] = 0.0;
  cur.phi_dot[n - 1] = cur.psi_dot[n - 1] = 0.0;

  const double t0 = cur.time;
  const long nsteps = std::max<long>(
      1, static_cast<long>(std::floor((cfg.t_end) / cfg.dt + 1e-9)));

  Trajectory traj;
  traj.snapshots.reserve(static_cast<size_t>(nsteps / cfg.snapshot_stride) + 2);
  traj.diagnostics.reserve(static_cast<size_t>(nsteps) + 1);
  traj.snapshots.push_back(cur);
  traj.diagnostics.push_back(basic_diagnostics(cur, m));

  Stepper st(cur, m, cfg);
  FieldState h1 = cur, h2 = cur;  // states at k-1 and k-2

  for (long k = 1; k <= nsteps; ++k) {
    std::swap(h1, h2);
    h1 = cur;
    if (!st.advance(cur)) {
      traj.completed = false;
      traj.failure = "fields went non-finite or blew up near t = " +
                     std::to_string(h1.time);
      if (traj.snapshots.back().time != h1.time) traj.snapshots.push_back(h1);
      return traj;
    }
    cur.time = t0 + static_cast<double>(k) * cfg.dt;
    traj.diagnostics.push_back(basic_diagnostics(cur, m));
    if (k >= 2) {
      const auto r = pcac_residual(h2, h1, cur, m, cfg.dt);
      double worst = 0.0;
      for (double v : r) worst = std::max(worst, v);
      traj.diagnostics[static_cast<size_t>(k) - 1].max_pcac_residual = worst;
    }
    if (k % cfg.snapshot_stride == 0 || k == nsteps)
      if (traj.snapshots.back().time != cur.time) traj.snapshots.push_back(cur);
  }
  return traj;
}

}  // namespace dwlab
