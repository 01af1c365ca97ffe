#include <gtest/gtest.h>

#include <cmath>

#include "fluxbal/trace.hpp"

using namespace fluxbal;

namespace {

PlanarWeakSolution burgers_shock_1d() { return {SystemModel::burgers(1), Point{1.0}, 0.0, State{1.0}, State{0.0}}; }

// Reports a fixed value with a deliberately large error estimate.
struct NoisySampler {
  Estimate face_flux(const Face&, double, double, double) const { return {State{1.0}, 0.5}; }
  int components() const { return 1; }
  Provenance provenance() const { return Provenance::quadrature; }
};

static_assert(FluxSampler<OracleSampler>);
static_assert(FluxSampler<NoisySampler>);

}  // namespace

TEST(FluxTrace, EqualsMinusMassChange) {
  const auto sol = burgers_shock_1d();
  const OracleSampler s{sol};
  const Box box{{-0.2, 0.7}};
  for (auto [t1, t2] : {std::pair{0.0, 1.0}, std::pair{0.3, 0.8}, std::pair{1.0, 2.0}}) {
    const FluxTrace h = flux_trace(s, boundary_faces(box), t1, t2, 1e-10);
    const double dm = mass(sol, box, t2)[0] - mass(sol, box, t1)[0];
    EXPECT_NEAR(h.value[0], -dm, 1e-10);
    EXPECT_EQ(h.provenance, Provenance::quadrature);
    EXPECT_LE(h.error_estimate, 1e-10);
  }
}

TEST(FluxTrace, ToleranceViolationRaises) {
  const NoisySampler s;
  EXPECT_THROW(flux_trace(s, boundary_faces(Box{{0.0, 1.0}}), 0.0, 1.0, 1e-3), AccuracyError);
  EXPECT_THROW(flux_trace(OracleSampler{burgers_shock_1d()}, {}, 1.0, 0.0, 1e-3), PreconditionError);
}

TEST(TraceProfile, ClosedFormOnInflatedBox) {
  const auto sol = burgers_shock_1d();
  const BoundaryFoliation fol{Domain{Box{{0.0, 0.25}}}, 0.5, 0.2};
  const int K = 16;
  const TraceProfile p = trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, K, 1e-10);
  ASSERT_EQ(p.size(), static_cast<std::size_t>(K + 1));
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double o = p.coordinate[k];
    const double oracle = o < 0.0 ? -0.25 - 2.0 * o : -0.25 - o;
    EXPECT_NEAR(p.traces[k].value[0], oracle, 1e-10) << o;
    EXPECT_NEAR(o, 0.2 * p.traces[k].y, 1e-15);
  }
  const LipschitzReport L = estimate_lipschitz(p);
  EXPECT_NEAR(L.constant[0], 2.0, 1e-8);
}

TEST(TraceProfile, CoarseAndFineAgreeAtSharedNodes) {
  const auto sol = burgers_shock_1d();
  const BoundaryFoliation fol{Domain{Box{{0.0, 0.25}}}, 0.5, 0.2};
  const auto coarse = trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, 2, 1e-10);
  const auto fine = trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, 4, 1e-10);
  for (std::size_t k = 0; k < coarse.size(); ++k)
    EXPECT_NEAR(coarse.traces[k].value[0], fine.traces[2 * k].value[0], 1e-10);
  EXPECT_THROW(trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, 1, 1e-10), PreconditionError);
}

TEST(TraceProfile, DiskFoliationBalance) {
  const Point nu{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const PlanarWeakSolution sol{SystemModel::burgers(2), nu, 0.0, State{1.0}, State{0.0}};
  const BoundaryFoliation fol{Domain{Disk{Point{0.0, 0.0}, 1.0}}, 0.5, 0.2};
  const auto p = trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, 4, 1e-9);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Domain d = fol.leaf(p.traces[k].y).domain;
    const double dm = mass(sol, d, 1.0)[0] - mass(sol, d, 0.0)[0];
    EXPECT_NEAR(p.traces[k].value[0], -dm, 1e-8);
  }
}

TEST(Lipschitz, FaceProfileSlopeConvergesToOne) {
  const auto sol = burgers_shock_1d();
  double prev_err = 1.0;
  for (int K : {8, 16, 32, 64, 128, 256}) {
    std::vector<double> xs;
    for (int k = 0; k <= K; ++k) xs.push_back(0.1 + 0.3 * k / K);
    const auto p = face_flux_profile(OracleSampler{sol}, Box{{0.0, 1.0}}, 0, xs, 0.0, 1.0, 1e-12);
    const double err = std::abs(estimate_lipschitz(p).constant[0] - 1.0);
    EXPECT_LE(err, std::max(prev_err, 1e-4));
    prev_err = err;
  }
  EXPECT_LE(prev_err, 1e-4);
}

TEST(Lipschitz, ConstantStateGivesZero) {
  const PlanarWeakSolution c{SystemModel::burgers(1), Point{1.0}, 0.0, State{0.4}, State{0.4}};
  const BoundaryFoliation fol{Domain{Box{{0.0, 1.0}}}, 0.5, 0.2};
  const auto p = trace_profile(OracleSampler{c}, fol, 0.0, 1.0, 8, 1e-12);
  EXPECT_LE(estimate_lipschitz(p).constant[0], 1e-12);
}

TEST(Lipschitz, HistoryIsOrderedBySamplingDensity) {
  const auto sol = burgers_shock_1d();
  const BoundaryFoliation fol{Domain{Box{{0.0, 0.25}}}, 0.5, 0.2};
  const auto p = trace_profile(OracleSampler{sol}, fol, 0.0, 1.0, 16, 1e-10);
  const auto L = estimate_lipschitz(p, State{2.0});
  ASSERT_EQ(L.history.size(), 4u);  // K = 2, 4, 8, 16
  for (std::size_t k = 1; k < L.history.size(); ++k) EXPECT_EQ(L.history[k].intervals, 2 * L.history[k - 1].intervals);
  EXPECT_EQ(L.history.back().intervals, 16);
  ASSERT_TRUE(L.analytic.has_value());
}

TEST(TimeModulus, BoundedByFluxTimesArea) {
  const std::vector<std::pair<PlanarWeakSolution, Domain>> cases{
      {burgers_shock_1d(), Domain{Box{{-0.3, 0.6}}}},
      {{SystemModel::shallow_water(), Point{1.0}, 0.0, State{2.0, 0.0}, State{1.0, 0.0}}, Domain{Box{{-1.0, 0.5}}}},
      {{SystemModel::burgers(2), Point{0.6, 0.8}, 0.0, State{1.0}, State{-1.0}}, Domain{Disk{Point{0.1, 0.0}, 0.5}}}};
  std::vector<double> t2s;
  for (int k = 1; k <= 40; ++k) t2s.push_back(0.025 * k);
  for (const auto& [sol, dom] : cases) {
    const auto faces = boundary_faces(dom);
    const State bound = sol.flux_bound() * boundary_measure(faces);
    for (const auto& inc : time_modulus(OracleSampler{sol}, faces, 0.0, t2s, 1e-10))
      for (std::size_t i = 0; i < inc.difference.size(); ++i)
        EXPECT_LE(inc.difference[i] / inc.dt, bound[i] * (1.0 + 1e-6));
  }
}

TEST(TimeModulus, IntegrandJumpsAtShockCrossing) {
  const auto sol = burgers_shock_1d();
  // The shock reaches x = 0.25 at t = 0.5: flux drops from 1/2 to 0.
  const State jump = integrand_jump(sol, Point{0.25}, Point{1.0}, 0.5);
  EXPECT_GE(std::abs(jump[0]), 0.4);
  EXPECT_NEAR(integrand_jump(sol, Point{0.25}, Point{1.0}, 0.3)[0], 0.0, 1e-15);
}
