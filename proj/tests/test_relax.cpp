#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dwlab/relax.hpp"

using namespace dwlab;

namespace {

constexpr double kKinkEnergy0 = 1.8856180831641267;  // 4 sqrt(2) / 3
constexpr double kRoot2 = 1.4142135623730951;

double max_abs(const std::vector<double>& v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::fabs(x));
  return worst;
}

double flow_step(const Grid& g) { return 0.4 * g.dx() * g.dx(); }

}  // namespace

TEST_CASE("initial_kink_guess: seeds, snapped endpoints, mirrored branches") {
  const Grid g(-10.0, 10.0, 201);
  const FieldState kink = initial_kink_guess(g, SeedKind::kink);
  CHECK(kink.phi.front() == -1.0);
  CHECK(kink.phi.back() == 1.0);
  CHECK(kink.phi[100] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(topological_charge(kink) == 1.0);
  CHECK(max_abs(kink.phi_dot) == 0.0);

  const FieldState anti = initial_kink_guess(g, SeedKind::antikink);
  CHECK(topological_charge(anti) == -1.0);
  for (int i = 0; i < g.n; ++i) CHECK(anti.phi[i] == -kink.phi[i]);

  const FieldState up = initial_kink_guess(g, SeedKind::psi_plus);
  const FieldState down = initial_kink_guess(g, SeedKind::psi_minus);
  CHECK(up.psi[100] == doctest::Approx(0.5).epsilon(1e-14));
  for (int i = 0; i < g.n; ++i) {
    CHECK(up.phi[i] == kink.phi[i]);
    CHECK(down.psi[i] == -up.psi[i]);
  }
}

TEST_CASE("bare kink algebra: tanh(sqrt(2) x) solves phi_xx = dV/dphi exactly") {
  // d^2/dx^2 tanh(ax) = -2 a^2 f (1 - f^2); with a^2 = 2 this equals
  // 4 f (f^2 - 1), the psi = 0 gradient for every lambda.
  const ModelParams m(3.2);
  for (double x : {-2.0, -0.7, 0.0, 0.4, 1.9}) {
    const double f = std::tanh(kRoot2 * x);
    const double fxx = -4.0 * f * (1.0 - f * f);
    CHECK(std::fabs(fxx - grad_potential({f, 0.0}, m).phi) < 1e-12);
  }
}

TEST_CASE("molecule_guess: winding pair with zero net charge") {
  const Grid g(-20.0, 20.0, 801);
  const FieldState s = molecule_guess(g);
  CHECK(s.phi[400] == doctest::Approx(1.0).epsilon(1e-14));  // x = 0
  CHECK(s.phi.front() == -1.0);
  CHECK(s.phi.back() == -1.0);
  CHECK(s.psi[420] == doctest::Approx(0.5).epsilon(1e-12));   // x = +1
  CHECK(s.psi[380] == doctest::Approx(-0.5).epsilon(1e-12));  // x = -1
  CHECK(topological_charge(s) == 0.0);
  CHECK_THROWS_AS(molecule_guess(Grid(0.0, 10.0, 101)), std::invalid_argument);
}

TEST_CASE("static_residual_max: O(dx^2) on the exact dressed kink") {
  const ModelParams m(1.0);
  auto resid = [&](int n) {
    const Grid g(-10.0, 10.0, n);
    FieldState s(g);
    const double a = std::sqrt(0.5);
    for (int i = 0; i < g.n; ++i) {
      s.phi[i] = std::tanh(g.x(i));
      s.psi[i] = a / std::cosh(g.x(i));
    }
    return static_residual_max(s, m);
  };
  const double coarse = resid(401), fine = resid(801);
  CHECK(coarse < 2e-3);
  CHECK(coarse / fine > 3.0);
  CHECK(coarse / fine < 5.0);
}

TEST_CASE("gradient flow: lambda = 0 kink converges to the known energy") {
  const Grid g(-10.0, 10.0, 401);
  const ModelParams m(0.0);
  const RelaxResult r = relax_gradient_flow(initial_kink_guess(g, SeedKind::kink), m,
                                            flow_step(g), 1e-8, 200000);
  CHECK(r.status == RelaxStatus::converged);
  CHECK(r.profile.energy == doctest::Approx(kKinkEnergy0).epsilon(5e-3));
  CHECK(r.profile.method == RelaxMethod::gradient_flow);
  CHECK(topological_charge(r.profile.state) == 1.0);
  for (size_t i = 1; i < r.energy_history.size(); ++i)
    CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-12);
}

TEST_CASE("gradient flow: dressed kink at lambda = 1 matches the exact solution") {
  // phi = tanh(x), psi = sech(x)/sqrt(2), E = 5/3.
  const Grid g(-20.0, 20.0, 401);
  const ModelParams m(1.0);
  const RelaxResult up = relax_gradient_flow(initial_kink_guess(g, SeedKind::psi_plus), m,
                                             flow_step(g), 1e-7, 400000);
  CHECK(up.status == RelaxStatus::converged);
  CHECK(up.profile.energy == doctest::Approx(5.0 / 3.0).epsilon(5e-3));
  CHECK(max_abs(up.profile.state.psi) == doctest::Approx(std::sqrt(0.5)).epsilon(5e-3));
  CHECK(static_residual_max(up.profile.state, m) < 5e-3);

  // The psi -> -psi branch flows through sign-mirrored arithmetic, so the
  // degeneracy is exact to the bit.
  const RelaxResult down = relax_gradient_flow(initial_kink_guess(g, SeedKind::psi_minus), m,
                                               flow_step(g), 1e-7, 400000);
  CHECK(down.profile.energy == up.profile.energy);
  for (int i = 0; i < g.n; ++i) {
    CHECK(down.profile.state.psi[i] == -up.profile.state.psi[i]);
    CHECK(down.profile.state.phi[i] == up.profile.state.phi[i]);
  }
}

TEST_CASE("gradient flow: psi dressing dies above lambda = 2") {
  const Grid g(-10.0, 10.0, 201);
  const ModelParams m(5.0);
  const RelaxResult r = relax_gradient_flow(initial_kink_guess(g, SeedKind::psi_plus), m,
                                            flow_step(g), 1e-8, 400000);
  CHECK(r.status == RelaxStatus::converged);
  CHECK(max_abs(r.profile.state.psi) < 1e-3);
  CHECK(r.profile.energy == doctest::Approx(kKinkEnergy0).epsilon(1e-2));
}

TEST_CASE("gradient flow: guards and failure statuses") {
  const Grid g(-10.0, 10.0, 101);
  const FieldState seed = initial_kink_guess(g, SeedKind::kink);
  const double dx2 = g.dx() * g.dx();
  CHECK_THROWS_AS(relax_gradient_flow(seed, ModelParams(1.0), 0.6 * dx2, 1e-8, 1000),
                  std::invalid_argument);
  CHECK_THROWS_AS(relax_gradient_flow(seed, ModelParams(1.0), 0.4 * dx2, -1.0, 1000),
                  std::invalid_argument);
  const RelaxResult r =
      relax_gradient_flow(seed, ModelParams(1.0), 0.4 * dx2, 1e-14, 3);
  CHECK(r.status == RelaxStatus::iteration_limit);
}

TEST_CASE("stochastic relaxation: deterministic, monotone, near the minimum") {
  const Grid g(-10.0, 10.0, 201);
  const ModelParams m(0.0);
  RelaxationSchedule sched;
  sched.rng_seed = 42;
  const RelaxResult a = relax_stochastic(initial_kink_guess(g, SeedKind::kink), m, sched);
  const RelaxResult b = relax_stochastic(initial_kink_guess(g, SeedKind::kink), m, sched);
  CHECK(a.profile.energy == b.profile.energy);
  for (int i = 0; i < g.n; ++i) CHECK(a.profile.state.phi[i] == b.profile.state.phi[i]);
  CHECK(a.profile.energy == doctest::Approx(kKinkEnergy0).epsilon(1e-2));
  for (size_t i = 1; i < a.energy_history.size(); ++i)
    CHECK(a.energy_history[i] <= a.energy_history[i - 1]);

  sched.rng_seed = 43;
  const RelaxResult c = relax_stochastic(initial_kink_guess(g, SeedKind::kink), m, sched);
  bool any_differs = false;
  for (int i = 0; i < g.n; ++i) any_differs |= c.profile.state.phi[i] != a.profile.state.phi[i];
  CHECK(any_differs);
}

TEST_CASE("stochastic + flow polish agrees with pure flow") {
  const Grid g(-10.0, 10.0, 201);
  const ModelParams m(1.0);
  RelaxationSchedule sched;
  const RelaxResult st = relax_stochastic(initial_kink_guess(g, SeedKind::psi_plus), m, sched);
  const RelaxResult hybrid =
      relax_gradient_flow(st.profile.state, m, flow_step(g), 1e-9, 400000);
  const RelaxResult flow = relax_gradient_flow(initial_kink_guess(g, SeedKind::psi_plus), m,
                                               flow_step(g), 1e-9, 400000);
  CHECK(std::fabs(hybrid.profile.energy - flow.profile.energy) < 1e-6);
}

TEST_CASE("make_static_profile: records vacua and validates its inputs") {
  const Grid g(-10.0, 10.0, 201);
  const ModelParams m(0.0);
  const FieldState s = initial_kink_guess(g, SeedKind::kink);
  const StaticProfile p = make_static_profile(s, m, RelaxMethod::gradient_flow, 7);
  CHECK(p.energy == total_energy(s, m));
  CHECK(p.left_vacuum.phi == -1.0);
  CHECK(p.right_vacuum.phi == 1.0);
  CHECK(p.iterations == 7);

  FieldState moving = s;
  moving.phi_dot[5] = 0.1;
  CHECK_THROWS_AS(make_static_profile(moving, m, RelaxMethod::gradient_flow, 0),
                  std::invalid_argument);
  FieldState off = s;
  off.phi.back() = 0.5;
  CHECK_THROWS_AS(make_static_profile(off, m, RelaxMethod::gradient_flow, 0),
                  std::invalid_argument);
}

TEST_CASE("mirror_profile: kink <-> antikink with the same psi branch") {
  const Grid g(-10.0, 10.0, 201);
  const ModelParams m(1.0);
  const FieldState s = initial_kink_guess(g, SeedKind::psi_plus);
  const StaticProfile p = make_static_profile(s, m, RelaxMethod::gradient_flow, 0);
  const StaticProfile q = mirror_profile(p);
  CHECK(q.energy == doctest::Approx(p.energy).epsilon(1e-14));
  CHECK(topological_charge(q.state) == -topological_charge(p.state));
  CHECK(q.left_vacuum.phi == 1.0);
  CHECK(q.right_vacuum.phi == -1.0);
  // sech is even, so the psi dressing keeps its sign under x -> -x.
  CHECK(q.state.psi[100] == p.state.psi[100]);
}
