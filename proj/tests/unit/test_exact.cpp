#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fluxbal/exact.hpp"

using namespace fluxbal;

namespace {

PlanarWeakSolution burgers_1d(double ul, double ur, double x0 = 0.0) {
  return {SystemModel::burgers(1), Point{1.0}, x0, State{ul}, State{ur}};
}

AxisFace face_1d(double x, int orientation = +1) { return AxisFace{1, 0, x, orientation, {}}; }

// Area of {x in disk : x . nu - c . nu <= d}, a circular segment.
double segment_area(double r, double d) {
  if (d <= -r) return 0.0;
  if (d >= r) return std::numbers::pi * r * r;
  return r * r * (std::numbers::pi - std::acos(d / r)) + d * std::sqrt(r * r - d * d);
}

}  // namespace

TEST(Sample, ShockAndFanValues) {
  const auto shock = burgers_1d(1.0, 0.0);
  EXPECT_EQ(shock.sample(Point{0.4}, 1.0)[0], 1.0);
  EXPECT_EQ(shock.sample(Point{0.6}, 1.0)[0], 0.0);
  const auto fan = burgers_1d(0.0, 1.0);
  EXPECT_NEAR(fan.sample(Point{0.5}, 1.0)[0], 0.5, 1e-15);
}

TEST(Sample, InitialDataAndInterfaceConvention) {
  const auto shock = burgers_1d(1.0, 0.0, 0.3);
  EXPECT_EQ(shock.sample(Point{0.2}, 0.0)[0], 1.0);
  EXPECT_EQ(shock.sample(Point{0.4}, 0.0)[0], 0.0);
  EXPECT_EQ(shock.sample(Point{0.3}, 0.0)[0], 1.0);
  // Discontinuity at x = 0.3 + 0.5 t: the left state.
  EXPECT_EQ(shock.sample(Point{0.8}, 1.0)[0], 1.0);
  EXPECT_THROW(shock.sample(Point{0.0}, -1.0), PreconditionError);
}

TEST(Sample, SupBoundHoldsOnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-2.0, 2.0), t(0.0, 2.0);
  const std::vector<PlanarWeakSolution> sols{
      burgers_1d(1.0, 0.0), burgers_1d(-0.5, 1.5),
      {SystemModel::shallow_water(), Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}},
      {SystemModel::shallow_water(), Point{1.0}, 0.0, State{1.0, -1.0}, State{1.0, 1.0}}};
  for (const auto& sol : sols) {
    const double c = sol.sup_norm();
    for (int k = 0; k < 500; ++k) EXPECT_LE(norm2(sol.sample(Point{x(rng)}, t(rng))), c * (1.0 + 1e-12));
  }
}

TEST(WaveEvents, StrictlyIncreasingInsideInterval) {
  const auto fan = burgers_1d(0.0, 1.0);  // edges at xi = 0 and 1
  const auto ev = wave_events(fan, 0.5, 0.0, 10.0);
  ASSERT_EQ(ev.times.size(), 1u);
  EXPECT_DOUBLE_EQ(ev.times[0], 0.5);
  const PlanarWeakSolution dam{SystemModel::shallow_water(), Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}};
  const auto all = wave_events(dam, -0.5, 0.0, 100.0);
  for (std::size_t k = 1; k < all.times.size(); ++k) EXPECT_LT(all.times[k - 1], all.times[k]);
  for (double t : wave_events(dam, -0.5, 0.2, 0.3).times) {
    EXPECT_GT(t, 0.2);
    EXPECT_LT(t, 0.3);
  }
}

TEST(Mass, Examples) {
  const auto shock = burgers_1d(1.0, 0.0);
  EXPECT_NEAR(mass(shock, Box{{0.0, 1.0}}, 1.0)[0], 0.5, 1e-12);
  EXPECT_EQ(mass(shock, Box::degenerate({{0.3, 0.3}}), 1.0)[0], 0.0);
  EXPECT_NEAR(mass(shock, Box{{0.0, 1.0}}, 0.0)[0], 0.0, 1e-14);
}

TEST(Mass, RarefactionClosedForm) {
  const auto fan = burgers_1d(0.0, 1.0);
  // u = x/t on (0, t): int_0^b x/t dx = b^2 / (2t) for b <= t.
  for (double b : {0.1, 0.25, 0.5, 0.9})
    EXPECT_NEAR(mass(fan, Box{{0.0, b}}, 1.0)[0], b * b / 2.0, 1e-11);
  EXPECT_NEAR(mass(fan, Box{{-1.0, 2.0}}, 1.0)[0], 0.5 + 1.0, 1e-11);
}

TEST(Mass, ObliqueShockOnDiskMatchesSegmentArea) {
  const Point nu{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  // Directional speed of Burgers along nu is (nu . 1) u, shock speed (nu . 1) / 2.
  const double s = (nu[0] + nu[1]) / 2.0;
  const PlanarWeakSolution sol{SystemModel::burgers(2), nu, 0.1, State{1.0}, State{0.0}};
  const Disk disk{Point{0.2, -0.1}, 0.8};
  for (double t : {0.0, 0.2, 0.5, 1.0}) {
    const double d = 0.1 + s * t - dot(disk.center, nu);
    EXPECT_NEAR(mass(sol, Domain{disk}, t)[0], segment_area(disk.radius, d), 1e-10) << "t=" << t;
  }
}

TEST(Mass, ObliqueShockOnBoxMatchesTriangleArea) {
  const Point nu{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const PlanarWeakSolution sol{SystemModel::burgers(2), nu, 0.0, State{1.0}, State{0.0}};
  // u = 1 where x + y <= t on the unit square; area t^2 / 2 for t <= 1.
  for (double t : {0.0, 0.3, 0.7, 1.0})
    EXPECT_NEAR(mass(sol, Domain{Box{{0.0, 1.0}, {0.0, 1.0}}}, t)[0], t * t / 2.0, 1e-10);
}

TEST(Mass, ContinuityBound) {
  const PlanarWeakSolution dam{SystemModel::shallow_water(), Point{1.0}, 0.5, State{2.0, 0.0}, State{1.0, 0.0}};
  const Box box{{0.0, 1.0}};
  const State bound = dam.flux_bound() * box.surface_measure();
  State prev = mass(dam, box, 0.0);
  for (int k = 1; k <= 50; ++k) {
    const double dt = 0.01;
    const State m = mass(dam, box, k * dt);
    for (int i = 0; i < 2; ++i) EXPECT_LE(std::abs(m[i] - prev[i]), bound[i] * dt * (1.0 + 1e-9) + 1e-10);
    prev = m;
  }
}

TEST(FaceFlux, Examples) {
  const auto shock = burgers_1d(1.0, 0.0);
  EXPECT_NEAR(exact_face_flux(shock, face_1d(0.25), 0.0, 1.0).value[0], 0.25, 1e-12);
  EXPECT_EQ(exact_face_flux(shock, face_1d(0.25), 0.0, 0.0).value[0], 0.0);
  EXPECT_NEAR(exact_face_flux(shock, face_1d(0.25, -1), 0.0, 1.0).value[0], -0.25, 1e-12);
  EXPECT_THROW(exact_face_flux(shock, face_1d(0.25), 0.5, 0.2), PreconditionError);
}

TEST(FaceFlux, ShockClosedFormOverGrid) {
  const auto shock = burgers_1d(1.0, 0.0);
  for (double T : {0.3, 1.0, 2.0})
    for (double x = 0.0; x <= 1.5; x += 0.0625) {
      const double oracle = 0.5 * std::max(0.0, T - 2.0 * x);
      EXPECT_NEAR(exact_face_flux(shock, face_1d(x), 0.0, T).value[0], oracle, 1e-11) << x << " " << T;
    }
}

TEST(FaceFlux, RarefactionClosedForm) {
  // u = 1 (flux 1/2) until the fan edge arrives at t = x, then u = x/t:
  // x/2 + int_x^T x^2 / (2 t^2) dt = x/2 + x^2/2 (1/x - 1/T) for x < T.
  const auto fan = burgers_1d(0.0, 1.0);
  for (double x : {0.1, 0.4, 0.8}) {
    const double T = 1.0;
    const double oracle = 0.5 * x + 0.5 * x * x * (1.0 / x - 1.0 / T);
    EXPECT_NEAR(exact_face_flux(fan, face_1d(x), 0.0, T).value[0], oracle, 1e-10);
  }
}

TEST(FaceFlux, ObliqueShockAxisFaceClosedForm) {
  const Point nu{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const PlanarWeakSolution sol{SystemModel::burgers(2), nu, 0.0, State{1.0}, State{0.0}};
  // On x = p with y in [0, 1]: u = 1 for y <= t - p, and f . e1 = 1/2 there.
  const auto oracle = [](double p, double T) {
    // 1/2 int_0^T clamp(t - p, 0, 1) dt
    const auto ramp = [](double z) {  // int_0^z clamp(s, 0, 1) ds for z >= 0
      return z <= 1.0 ? 0.5 * z * z : 0.5 + (z - 1.0);
    };
    return 0.5 * (T > p ? ramp(T - p) : 0.0);
  };
  for (double p : {0.0, 0.2, 0.6})
    for (double T : {0.5, 1.0, 2.5}) {
      const AxisFace face{2, 0, p, +1, {0.0, 1.0}};
      EXPECT_NEAR(exact_face_flux(sol, face, 0.0, T).value[0], oracle(p, T), 1e-10) << p << " " << T;
    }
}

TEST(FaceFlux, TimeAdditivityAndAntisymmetry) {
  const PlanarWeakSolution dam{SystemModel::shallow_water(), Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}};
  const PlanarWeakSolution oblique{SystemModel::burgers(2), Point{0.6, 0.8}, 0.1, State{-0.5}, State{1.0}};
  const std::vector<std::pair<const PlanarWeakSolution*, Face>> cases{
      {&dam, face_1d(-0.7)}, {&dam, face_1d(0.9)},
      {&oblique, AxisFace{2, 1, 0.3, +1, {-1.0, 1.0}}}, {&oblique, ArcFace{Point{0.0, 0.0}, 0.7, 0.0, 2.0 * std::numbers::pi}}};
  for (const auto& [sol, face] : cases) {
    const State whole = exact_face_flux(*sol, face, 0.1, 1.3).value;
    for (double ts : {0.2, 0.55, 1.0}) {
      const State parts = exact_face_flux(*sol, face, 0.1, ts).value + exact_face_flux(*sol, face, ts, 1.3).value;
      for (std::size_t i = 0; i < whole.size(); ++i) EXPECT_NEAR(parts[i], whole[i], 1e-10);
    }
  }
  const State plus = exact_face_flux(dam, face_1d(0.9, +1), 0.0, 1.0).value;
  const State minus = exact_face_flux(dam, face_1d(0.9, -1), 0.0, 1.0).value;
  for (int i = 0; i < 2; ++i) EXPECT_EQ(plus[i], -minus[i]);
}

TEST(FaceFlux, ObliqueConsistencyWithOneDimension) {
  const std::vector<std::pair<double, double>> jumps{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 2.0}};
  for (const auto& [ul, ur] : jumps) {
    const PlanarWeakSolution one{SystemModel::burgers(1), Point{1.0}, 0.2, State{ul}, State{ur}};
    const PlanarWeakSolution two{SystemModel::burgers(2), Point{1.0, 0.0}, 0.2, State{ul}, State{ur}};
    for (double x : {-0.5, 0.1, 0.2, 0.45, 1.0}) {
      const double f1 = exact_face_flux(one, face_1d(x), 0.0, 1.0).value[0];
      const double f2 = exact_face_flux(two, AxisFace{2, 0, x, +1, {0.0, 1.0}}, 0.0, 1.0).value[0];
      EXPECT_NEAR(f1, f2, 1e-10) << ul << " " << ur << " " << x;
    }
  }
}

TEST(FaceFlux, DamBreakAgainstMidpointTimeIntegration) {
  const SystemModel sw = SystemModel::shallow_water();
  const PlanarWeakSolution dam{sw, Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}};
  // A midpoint rule with step h errs by at most h times the jump at each wave crossing.
  const int steps = 200000;
  for (double x : {-0.6, 0.3, 0.0}) {
    State sum(2, 0.0);
    for (int k = 0; k < steps; ++k) {
      const double t = (k + 0.5) / steps;
      sum += sw.flux(dam.sample(Point{x}, t)).contract(Point{1.0}) * (1.0 / steps);
    }
    const State f = exact_face_flux(dam, face_1d(x), 0.0, 1.0).value;
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(f[i], sum[i], 1e-5 * (1.0 + std::abs(sum[i]))) << x;
  }
}

TEST(Balance, ObliqueShockOnDisk) {
  const Point nu{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const PlanarWeakSolution sol{SystemModel::burgers(2), nu, 0.0, State{1.0}, State{0.0}};
  const Disk disk{Point{0.0, 0.0}, 1.0};
  const double change = mass(sol, Domain{disk}, 1.0)[0] - mass(sol, Domain{disk}, 0.0)[0];
  double out = 0.0;
  for (const Face& f : boundary_faces(disk)) out += exact_face_flux(sol, f, 0.0, 1.0).value[0];
  EXPECT_NEAR(change + out, 0.0, 1e-9);
}

TEST(WeakForm, ConstantSolutionIsExact) {
  std::mt19937_64 rng(1);
  const PlanarWeakSolution c{SystemModel::burgers(1), Point{1.0}, 0.0, State{0.7}, State{0.7}};
  const Cylinder q{Box{{-1.0, 1.0}}, 0.0, 1.0};
  for (int k = 0; k < 5; ++k)
    EXPECT_LE(weak_form_residual(c, BumpTestFunction::random(rng, q.box, q.t1, q.t2, 1), q), 1e-12);
}

TEST(WeakForm, RiemannSolutionsBelowTolerance) {
  std::mt19937_64 rng(2);
  const std::vector<std::pair<PlanarWeakSolution, Cylinder>> cases{
      {burgers_1d(1.0, 0.0), {Box{{-0.5, 1.0}}, 0.0, 1.0}},
      {burgers_1d(0.0, 1.0), {Box{{-0.5, 1.0}}, 0.0, 1.0}},
      {{SystemModel::shallow_water(), Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}}, {Box{{-1.0, 1.0}}, 0.0, 0.3}},
      {{SystemModel::burgers(2), Point{0.6, 0.8}, 0.0, State{1.0}, State{0.0}}, {Box{{-0.5, 0.5}, {-0.5, 0.5}}, 0.0, 0.5}}};
  for (const auto& [sol, q] : cases)
    for (int k = 0; k < 3; ++k) {
      const auto phi = BumpTestFunction::random(rng, q.box, q.t1, q.t2, sol.components());
      EXPECT_LE(weak_form_residual(sol, phi, q), 1e-6);
    }
}

TEST(WeakForm, WrongShockSpeedIsDetected) {
  // A unit step moving at speed 1 solves advection, not Burgers (speed 1/2).
  const PlanarWeakSolution moved{SystemModel::advection(Point{1.0}), Point{1.0}, 0.0, State{1.0}, State{0.0}};
  const Cylinder q{Box{{0.0, 1.0}}, 0.0, 1.0};
  BumpTestFunction phi;
  phi.center = Point{0.5};
  phi.radius = Point{0.45};
  phi.t_center = 0.5;
  phi.t_radius = 0.45;
  phi.a0[0] = 1.0;
  phi.ax[0] = Point{0.0};
  EXPECT_LE(weak_form_residual(moved, phi, q), 1e-9);
  EXPECT_GT(weak_form_residual(SystemModel::burgers(1), moved, phi, q), 1e-3);
}

TEST(SineAdvection, MassAndFluxMatchQuadrature) {
  const SystemModel adv = SystemModel::advection(Point{1.0, 0.5});
  const SineAdvectionSolution sol{adv, 0.3, 0.8, Point{1.0, 2.0}};
  const Box box{{0.1, 0.7}, {-0.2, 0.4}};
  const GaussRule& g = gauss_legendre(20);
  const double t = 0.37;
  const auto m = gauss_fixed([&](double x) {
    return gauss_fixed([&](double y) { return sol.sample(Point{x, y}, t); }, -0.2, 0.4, g);
  }, 0.1, 0.7, g);
  EXPECT_NEAR(sol.mass(box, t)[0], m[0], 1e-12);
  const AxisFace face{2, 1, 0.4, -1, {0.1, 0.7}};
  const auto f = gauss_fixed([&](double tt) {
    return gauss_fixed([&](double x) { return adv.flux(sol.sample(Point{x, 0.4}, tt)).contract(Point{0.0, -1.0}); },
                       0.1, 0.7, g);
  }, 0.2, 0.9, g);
  EXPECT_NEAR(sol.face_flux(face, 0.2, 0.9).value[0], f[0], 1e-12);
}
