#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fluxbal/geometry.hpp"

using namespace fluxbal;

namespace {

Box box_of(const Leaf& leaf) { return std::get<Box>(leaf.domain); }

}  // namespace

TEST(Foliate, BoxInflationOffsets) {
  const Box unit{{0.0, 1.0}, {0.0, 1.0}};
  const Foliation f = foliate(unit, 0.5, 0.1, 3);
  ASSERT_EQ(f.leaves.size(), 3u);
  const double expect[3][2] = {{0.05, 0.95}, {0.0, 1.0}, {-0.05, 1.05}};
  for (int k = 0; k < 3; ++k)
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(box_of(f.leaves[k]).side(a).lo, expect[k][0], 1e-15);
      EXPECT_NEAR(box_of(f.leaves[k]).side(a).hi, expect[k][1], 1e-15);
    }
  EXPECT_EQ(f.family.kind(), FoliationKind::box_inflation);
}

TEST(Foliate, ConcentricCircles) {
  const Foliation f = foliate(Disk(Point{0.0, 0.0}, 1.0), 0.5, 0.1, 3);
  const double r[3] = {0.95, 1.0, 1.05};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::get<Disk>(f.leaves[k].domain).radius, r[k], 1e-15);
  EXPECT_EQ(f.family.kind(), FoliationKind::concentric_sphere);
}

TEST(Foliate, TwoLeavesWithinWidth) {
  const Box unit{{0.0, 1.0}, {0.0, 1.0}};
  for (double w : {1e-2, 1e-4, 1e-8}) {
    const Foliation f = foliate(unit, 0.3, w, 2);
    const Box a = box_of(f.leaves[0]), b = box_of(f.leaves[1]);
    double haus = 0.0;
    for (int ax = 0; ax < 2; ++ax)
      haus = std::max({haus, std::abs(a.side(ax).lo - b.side(ax).lo), std::abs(a.side(ax).hi - b.side(ax).hi)});
    EXPECT_LE(haus, w * (1 + 1e-12));
  }
}

TEST(Foliate, Errors) {
  const Box small{{0.0, 0.1}};
  EXPECT_THROW(foliate(small, 0.5, 1.0, 3), GeometryError);
  EXPECT_THROW(foliate(Disk(Point{0.0, 0.0}, 0.1), 0.5, 1.0, 3), GeometryError);
  EXPECT_THROW(foliate(small, 0.0, 0.01, 3), PreconditionError);
  EXPECT_THROW(foliate(small, 1.0, 0.01, 3), PreconditionError);
  EXPECT_THROW(foliate(small, 0.5, 0.01, 1), PreconditionError);
}

TEST(Foliate, NormalCoordinateIsDistanceForCircles) {
  const BoundaryFoliation fam(Disk(Point{0.3, -0.2}, 0.8), 0.4, 0.2);
  for (double y1 : {-0.4, -0.1, 0.3})
    for (double y2 : {-0.25, 0.0, 0.6}) {
      const double r1 = std::get<Disk>(fam.leaf(y1).domain).radius;
      const double r2 = std::get<Disk>(fam.leaf(y2).domain).radius;
      EXPECT_NEAR(std::abs(r1 - r2), std::abs(fam.leaf(y1).offset - fam.leaf(y2).offset), 1e-15);
    }
}

TEST(Foliate, StrictNesting) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const Domain base : {Domain(Box{{0.0, 1.0}, {-1.0, 2.0}}), Domain(Disk(Point{0.0, 0.0}, 1.0))}) {
    const BoundaryFoliation fam(base, 0.5, 0.2);
    for (int k = 0; k < 50; ++k) {
      const double y1 = -0.5 + U(rng), y2 = -0.5 + U(rng);
      const double lo = std::min(y1, y2), hi = std::max(y1, y2);
      if (hi - lo < 1e-6) continue;
      const Leaf inner = fam.leaf(lo), outer = fam.leaf(hi);
      // Every inner boundary point lies strictly inside the outer domain.
      for (const Face& f : inner.boundary)
        for (const Point& p : surface_quadrature(f, 3).nodes) {
          const bool inside = std::visit([&](const auto& d) { return d.contains(p, -1e-9); }, outer.domain);
          EXPECT_TRUE(inside);
        }
    }
  }
}

TEST(OutwardNormal, Examples) {
  const Box unit{{0.0, 1.0}, {0.0, 1.0}};
  const auto faces = boundary_faces(unit);
  // order: axis0 lo, axis0 hi, axis1 lo, axis1 hi
  const Point right = outward_normal(faces[1], Point{1.0, 0.5});
  EXPECT_EQ(right, (Point{1.0, 0.0}));
  const Point bottom = outward_normal(faces[2], Point{0.5, 0.0});
  EXPECT_EQ(bottom, (Point{0.0, -1.0}));
  const Face circle = ArcFace{Point{0.0, 0.0}, 1.0, 0.0, 2.0 * std::numbers::pi};
  const Point top = outward_normal(circle, Point{0.0, 1.0});
  EXPECT_NEAR(top[0], 0.0, 1e-15);
  EXPECT_NEAR(top[1], 1.0, 1e-15);
}

TEST(OutwardNormal, OffFaceIsPreconditionError) {
  const auto faces = boundary_faces(Box{{0.0, 1.0}, {0.0, 1.0}});
  EXPECT_THROW(outward_normal(faces[1], Point{0.9, 0.5}), PreconditionError);
  EXPECT_THROW(outward_normal(faces[1], Point{1.0, 1.5}), PreconditionError);
  const Face circle = ArcFace{Point{0.0, 0.0}, 1.0, 0.0, std::numbers::pi};
  EXPECT_THROW(outward_normal(circle, Point{0.0, 0.9}), PreconditionError);
  EXPECT_THROW(outward_normal(circle, Point{0.0, -1.0}), PreconditionError);
}

TEST(SurfaceQuadrature, WeightSums) {
  const Face seg = AxisFace{2, 0, 1.0, +1, {0.0, 1.0}};
  const auto q1 = surface_quadrature(seg, 1);
  ASSERT_EQ(q1.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(q1.weights[0], 1.0);
  EXPECT_NEAR(q1.nodes[0][1], 0.5, 1e-15);
  const Face circle = ArcFace{Point{0.0, 0.0}, 1.0, 0.0, 2.0 * std::numbers::pi};
  for (int order = 1; order <= 8; ++order)
    EXPECT_NEAR(surface_quadrature(circle, order).total_weight(), 2.0 * std::numbers::pi, 1e-12);
  const Face two = AxisFace{2, 1, 0.0, -1, {0.0, 2.0}};
  EXPECT_NEAR(surface_quadrature(two, 3).total_weight(), 2.0, 1e-15);
  EXPECT_THROW(surface_quadrature(two, 0), PreconditionError);
}

TEST(SurfaceQuadrature, PolynomialExactnessOnAxisFaces) {
  const Face f = AxisFace{2, 1, 0.3, +1, {-0.5, 1.5}};
  for (int order = 1; order <= 6; ++order) {
    const auto q = surface_quadrature(f, order);
    for (int p = 0; p <= 2 * order - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i][0], p);
      const double exact = (std::pow(1.5, p + 1) - std::pow(-0.5, p + 1)) / (p + 1);
      EXPECT_NEAR(s, exact, 1e-12) << order << " " << p;
    }
  }
}

TEST(BoundaryFaces, InflatedBoxIsClosed) {
  const Box base{{0.0, 2.0}, {0.0, 1.0}};
  const BoundaryFoliation fam(base, 0.5, 0.4);
  for (double y : {-0.5, -0.2, 0.0, 0.25, 0.5}) {
    const Leaf leaf = fam.leaf(y);
    double perimeter = 0.0;
    for (const Face& f : leaf.boundary) perimeter += surface_quadrature(f, 2).total_weight();
    const double o = 0.4 * y;
    EXPECT_NEAR(perimeter, 2.0 * ((2.0 + 2 * o) + (1.0 + 2 * o)), 1e-12);
    // Divergence-free constant field has zero net flux: sum of w * nu vanishes.
    Point net(2, 0.0);
    for (const Face& f : leaf.boundary) {
      const auto q = surface_quadrature(f, 2);
      for (std::size_t i = 0; i < q.nodes.size(); ++i) net += q.normals[i] * q.weights[i];
    }
    EXPECT_NEAR(norm2(net), 0.0, 1e-12);
  }
}
