#include <cmath>
#include <random>

#include "doctest.h"
#include "dwlab/model.hpp"

using namespace dwlab;

namespace {

FieldPoint fd_grad(const FieldPoint& p, const ModelParams& m, double h) {
  FieldPoint g;
  g.phi = (potential({p.phi + h, p.psi}, m) - potential({p.phi - h, p.psi}, m)) / (2 * h);
  g.psi = (potential({p.phi, p.psi + h}, m) - potential({p.phi, p.psi - h}, m)) / (2 * h);
  return g;
}

}  // namespace

TEST_CASE("potential: pinned values") {
  CHECK(potential({1.0, 0.0}, ModelParams(1.0)) == 0.0);
  CHECK(potential({-1.0, 0.0}, ModelParams(3.7)) == 0.0);
  CHECK(potential({0.0, 0.0}, ModelParams(0.0)) == 1.0);
  CHECK(potential({0.0, 0.0}, ModelParams(5.0)) == 1.0);
  CHECK(potential({0.0, 1.0}, ModelParams(1.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(potential({0.5, 0.5}, ModelParams(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("potential: nonnegative and parity even") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double lambda : {0.0, 0.7, 1.0, 2.5, 4.0, 5.0}) {
    const ModelParams m(lambda);
    for (int i = 0; i < 200; ++i) {
      const FieldPoint p{u(rng), u(rng)};
      const double v = potential(p, m);
      CHECK(v >= 0.0);
      // Both reflections enter only through squares, so equality is exact.
      CHECK(potential({-p.phi, p.psi}, m) == v);
      CHECK(potential({p.phi, -p.psi}, m) == v);
    }
  }
}

TEST_CASE("grad_potential: pinned values and critical points") {
  const FieldPoint g = grad_potential({0.5, 0.5}, ModelParams(2.0));
  CHECK(g.phi == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(g.psi == doctest::Approx(0.0).epsilon(1e-15));
  for (double lambda : {0.0, 1.0, 4.0}) {
    const ModelParams m(lambda);
    for (const FieldPoint p : {FieldPoint{1.0, 0.0}, FieldPoint{-1.0, 0.0}, FieldPoint{0.0, 0.0}}) {
      const FieldPoint gc = grad_potential(p, m);
      CHECK(gc.phi == 0.0);
      CHECK(gc.psi == 0.0);
    }
  }
}

TEST_CASE("grad_potential: matches finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double lambda : {0.0, 1.0, 2.5, 5.0}) {
    const ModelParams m(lambda);
    for (int i = 0; i < 100; ++i) {
      const FieldPoint p{u(rng), u(rng)};
      const FieldPoint ga = grad_potential(p, m);
      const FieldPoint gn = fd_grad(p, m, 1e-5);
      CHECK(ga.phi == doctest::Approx(gn.phi).epsilon(1e-6));
      CHECK(ga.psi == doctest::Approx(gn.psi).epsilon(1e-6));
    }
  }
}

TEST_CASE("hessian: pinned values") {
  const ModelParams m(1.0);
  const Hessian2 hv = hessian({1.0, 0.0}, m);
  CHECK(hv.dphi2 == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(hv.dphi_dpsi == 0.0);
  CHECK(hv.dpsi2 == doctest::Approx(1.0).epsilon(1e-15));

  const Hessian2 ho = hessian({0.0, 0.0}, m);
  CHECK(ho.dphi2 == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(ho.dpsi2 == doctest::Approx(-3.0).epsilon(1e-15));

  CHECK(hessian({1.0, 1.0}, m).dphi_dpsi == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("hessian: matches finite differences of the gradient") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-5;
  for (double lambda : {0.0, 1.0, 5.0}) {
    const ModelParams m(lambda);
    for (int i = 0; i < 100; ++i) {
      const FieldPoint p{u(rng), u(rng)};
      const Hessian2 hs = hessian(p, m);
      const double dpp = (grad_potential({p.phi + h, p.psi}, m).phi -
                          grad_potential({p.phi - h, p.psi}, m).phi) / (2 * h);
      const double dps = (grad_potential({p.phi, p.psi + h}, m).phi -
                          grad_potential({p.phi, p.psi - h}, m).phi) / (2 * h);
      const double dss = (grad_potential({p.phi, p.psi + h}, m).psi -
                          grad_potential({p.phi, p.psi - h}, m).psi) / (2 * h);
      CHECK(hs.dphi2 == doctest::Approx(dpp).epsilon(1e-5));
      CHECK(hs.dphi_dpsi == doctest::Approx(dps).epsilon(1e-5));
      CHECK(hs.dpsi2 == doctest::Approx(dss).epsilon(1e-5));
    }
  }
}

TEST_CASE("hessian: eigenvalues ascending and trace/det consistent") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const ModelParams m(1.3);
  for (int i = 0; i < 50; ++i) {
    const FieldPoint p{u(rng), u(rng)};
    const Hessian2 hs = hessian(p, m);
    const auto [lo, hi] = hs.eigenvalues();
    CHECK(lo <= hi);
    CHECK(lo + hi == doctest::Approx(hs.dphi2 + hs.dpsi2).epsilon(1e-12));
    CHECK(lo * hi ==
          doctest::Approx(hs.dphi2 * hs.dpsi2 - hs.dphi_dpsi * hs.dphi_dpsi).epsilon(1e-10));
  }
}

TEST_CASE("vacuum_masses: (8, lambda)") {
  for (double lambda : {0.0, 1.0, 4.0, 5.0}) {
    const auto [m_phi2, m_psi2] = vacuum_masses(ModelParams(lambda));
    CHECK(m_phi2 == 8.0);
    CHECK(m_psi2 == lambda);
    const Hessian2 hv = hessian({1.0, 0.0}, ModelParams(lambda));
    CHECK(hv.dphi2 == doctest::Approx(m_phi2).epsilon(1e-15));
    CHECK(hv.dpsi2 == doctest::Approx(m_psi2).epsilon(1e-14));
  }
}

TEST_CASE("classify_extrema: lambda = 1 has the five expected points") {
  const ModelParams m(1.0);
  const auto pts = classify_extrema(m);
  REQUIRE(pts.size() == 5);

  // Sorted by phi then psi.
  const double s = std::sqrt(0.75);
  CHECK(pts[0].location.phi == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pts[0].kind == ExtremumKind::minimum);
  CHECK(pts[0].value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pts[1].location.psi == doctest::Approx(-s).epsilon(1e-12));
  CHECK(pts[1].kind == ExtremumKind::saddle);
  CHECK(pts[1].value == doctest::Approx(7.0 / 16.0).epsilon(1e-12));
  CHECK(pts[2].location.phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pts[2].location.psi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pts[2].kind == ExtremumKind::local_maximum);
  CHECK(pts[2].value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pts[3].location.psi == doctest::Approx(s).epsilon(1e-12));
  CHECK(pts[3].kind == ExtremumKind::saddle);
  CHECK(pts[4].location.phi == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pts[4].kind == ExtremumKind::minimum);

  for (const auto& p : pts) {
    CHECK(!p.degenerate);
    const FieldPoint g = grad_potential(p.location, m);
    CHECK(std::abs(g.phi) < 1e-12);
    CHECK(std::abs(g.psi) < 1e-12);
  }
}

TEST_CASE("classify_extrema: degenerate boundaries lambda = 0 and 4") {
  const auto flat = classify_extrema(ModelParams(0.0));
  REQUIRE(flat.size() == 5);
  // The psi-axis points sit on the vacuum circle: V = 0, Goldstone zero mode.
  CHECK(flat[1].location.psi == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(flat[1].value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(flat[1].degenerate);
  CHECK(flat[3].degenerate);
  CHECK(flat[0].degenerate);  // minima too: zero mode along the circle
  CHECK(flat[4].degenerate);

  const auto merged = classify_extrema(ModelParams(4.0));
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].kind == ExtremumKind::minimum);
  CHECK(merged[1].location.phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(merged[1].degenerate);  // saddles merge into the origin here
  CHECK(merged[2].kind == ExtremumKind::minimum);
}

TEST_CASE("classify_extrema: origin becomes a saddle for lambda > 4") {
  const auto pts = classify_extrema(ModelParams(5.0));
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].location.phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pts[1].kind == ExtremumKind::saddle);
  CHECK(!pts[1].degenerate);
  const auto [lo, hi] = hessian(pts[1].location, ModelParams(5.0)).eigenvalues();
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);
}
