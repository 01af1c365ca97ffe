#ifndef FLUXBAL_GEOMETRY_HPP_
#define FLUXBAL_GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/fixed_vector.hpp"
#include "fluxbal/quadrature.hpp"

namespace fluxbal {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
  bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
};

/// Axis-aligned box prod [a_i, b_i], n <= 2.
class Box {
 public:
  Box() = default;
  Box(std::initializer_list<Interval> sides) : Box(std::vector<Interval>(sides)) {}
  explicit Box(const std::vector<Interval>& sides) {
    assign(sides);
    for (std::size_t i = 0; i < dim_; ++i)
      if (!(sides_[i].lo < sides_[i].hi))
        throw GeometryError("Box: side " + std::to_string(i) + " must satisfy a < b");
  }

  /// Allows a_i == b_i; only for zero-measure test domains.
  static Box degenerate(const std::vector<Interval>& sides) {
    Box b;
    b.assign(sides);
    for (std::size_t i = 0; i < b.dim_; ++i)
      if (sides[i].lo > sides[i].hi) throw GeometryError("Box: side with a > b");
    return b;
  }

  int dim() const noexcept { return static_cast<int>(dim_); }
  const Interval& side(int axis) const noexcept { return sides_[axis]; }

  double volume() const noexcept {
    double v = 1.0;
    for (std::size_t i = 0; i < dim_; ++i) v *= sides_[i].length();
    return v;
  }

  /// Perimeter in 2D; in 1D the two end points count one each.
  double surface_measure() const noexcept {
    if (dim_ == 1) return 2.0;
    return 2.0 * (sides_[0].length() + sides_[1].length());
  }

  bool contains(const Point& p, double tol = 0.0) const noexcept {
    for (std::size_t i = 0; i < dim_; ++i)
      if (!sides_[i].contains(p[i], tol)) return false;
    return true;
  }

  /// Minkowski sum with a ball of radius `offset` in the max-norm (offset < 0 shrinks).
  Box inflated(double offset) const {
    std::vector<Interval> s;
    for (std::size_t i = 0; i < dim_; ++i) s.push_back({sides_[i].lo - offset, sides_[i].hi + offset});
    for (const auto& iv : s)
      if (!(iv.lo < iv.hi)) throw GeometryError("Box::inflated: inner domain is empty");
    return Box(s);
  }

  Point center() const {
    Point c(dim_);
    for (std::size_t i = 0; i < dim_; ++i) c[i] = 0.5 * (sides_[i].lo + sides_[i].hi);
    return c;
  }

 private:
  void assign(const std::vector<Interval>& sides) {
    if (sides.empty() || sides.size() > kMaxDim) throw GeometryError("Box: dimension must be 1 or 2");
    dim_ = sides.size();
    std::copy(sides.begin(), sides.end(), sides_.begin());
  }

  std::array<Interval, kMaxDim> sides_{};
  std::size_t dim_ = 0;
};

/// Disk in R^2.
struct Disk {
  Point center{0.0, 0.0};
  double radius = 1.0;

  Disk() = default;
  Disk(const Point& c, double r) : center(c), radius(r) {
    if (c.size() != 2) throw GeometryError("Disk: center must be 2D");
    if (!(r > 0.0)) throw GeometryError("Disk: radius must be positive");
  }
  double volume() const noexcept { return std::numbers::pi * radius * radius; }
  double surface_measure() const noexcept { return 2.0 * std::numbers::pi * radius; }
  bool contains(const Point& p, double tol = 0.0) const noexcept {
    return norm2(p - center) <= radius + tol;
  }
  Disk inflated(double offset) const {
    if (!(radius + offset > 0.0)) throw GeometryError("Disk::inflated: inner domain is empty");
    return Disk(center, radius + offset);
  }
};

using Domain = std::variant<Box, Disk>;

inline int domain_dim(const Domain& d) {
  return std::visit([](const auto& x) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Box>) return x.dim();
    else return 2;
  }, d);
}

inline double domain_volume(const Domain& d) {
  return std::visit([](const auto& x) { return x.volume(); }, d);
}

/// Section x_axis = position of a box boundary; orientation is +1 for +e_axis.
struct AxisFace {
  int dim = 1;
  int axis = 0;
  double position = 0.0;
  int orientation = 1;
  Interval cross{};  // the other axis' extent in 2D; unused in 1D
};

/// Circular arc {center + r (cos th, sin th) : th in [theta0, theta1]} with radial outward normal.
struct ArcFace {
  Point center{0.0, 0.0};
  double radius = 1.0;
  double theta0 = 0.0;
  double theta1 = 2.0 * std::numbers::pi;
};

using Face = std::variant<AxisFace, ArcFace>;

inline double face_measure(const Face& face) {
  if (const auto* a = std::get_if<AxisFace>(&face)) return a->dim == 1 ? 1.0 : a->cross.length();
  const auto& arc = std::get<ArcFace>(face);
  return arc.radius * (arc.theta1 - arc.theta0);
}

inline std::vector<Face> boundary_faces(const Box& box) {
  std::vector<Face> out;
  const int n = box.dim();
  for (int j = 0; j < n; ++j) {
    const Interval cross = n == 2 ? box.side(1 - j) : Interval{};
    out.push_back(AxisFace{n, j, box.side(j).lo, -1, cross});
    out.push_back(AxisFace{n, j, box.side(j).hi, +1, cross});
  }
  return out;
}

inline std::vector<Face> boundary_faces(const Disk& disk) {
  return {ArcFace{disk.center, disk.radius, 0.0, 2.0 * std::numbers::pi}};
}

inline std::vector<Face> boundary_faces(const Domain& d) {
  return std::visit([](const auto& x) { return boundary_faces(x); }, d);
}

inline double boundary_measure(const std::vector<Face>& faces) {
  double s = 0.0;
  for (const Face& f : faces) s += face_measure(f);
  return s;
}

/// Parametrization tau -> point on a face; dS = jacobian dtau. 1D point
/// faces have a one-point parameter range and unit jacobian.
struct FaceChart {
  Face face;

  Interval range() const {
    if (const auto* a = std::get_if<AxisFace>(&face))
      return a->dim == 1 ? Interval{0.0, 0.0} : a->cross;
    const auto& arc = std::get<ArcFace>(face);
    return {arc.theta0, arc.theta1};
  }
  Point point(double tau) const {
    if (const auto* a = std::get_if<AxisFace>(&face)) {
      if (a->dim == 1) return Point{a->position};
      Point p(2);
      p[a->axis] = a->position;
      p[1 - a->axis] = tau;
      return p;
    }
    const auto& arc = std::get<ArcFace>(face);
    return arc.center + Point{arc.radius * std::cos(tau), arc.radius * std::sin(tau)};
  }
  Point normal(double tau) const {
    if (const auto* a = std::get_if<AxisFace>(&face)) {
      Point n(a->dim, 0.0);
      n[a->axis] = a->orientation;
      return n;
    }
    return Point{std::cos(tau), std::sin(tau)};
  }
  double jacobian() const {
    if (std::holds_alternative<AxisFace>(face)) return 1.0;
    return std::get<ArcFace>(face).radius;
  }
};

/// Unit outward normal at a point of the face; the point must lie on it within 1e-12.
inline Point outward_normal(const Face& face, const Point& p) {
  constexpr double tol = 1e-12;
  if (const auto* a = std::get_if<AxisFace>(&face)) {
    if (static_cast<int>(p.size()) != a->dim) throw PreconditionError("outward_normal: dimension mismatch");
    const bool on = std::abs(p[a->axis] - a->position) <= tol &&
                    (a->dim == 1 || a->cross.contains(p[1 - a->axis], tol));
    if (!on) throw PreconditionError("outward_normal: point is not on the face");
    return FaceChart{face}.normal(0.0);
  }
  const auto& arc = std::get<ArcFace>(face);
  if (p.size() != 2) throw PreconditionError("outward_normal: dimension mismatch");
  const Point r = p - arc.center;
  if (std::abs(norm2(r) - arc.radius) > tol) throw PreconditionError("outward_normal: point is not on the arc");
  double th = std::atan2(r[1], r[0]);
  const double two_pi = 2.0 * std::numbers::pi;
  while (th < arc.theta0 - tol) th += two_pi;
  while (th > arc.theta1 + tol) th -= two_pi;
  if (th < arc.theta0 - tol) throw PreconditionError("outward_normal: point is outside the arc's angular range");
  return r * (1.0 / norm2(r));
}

struct SurfaceQuadrature {
  std::vector<Point> nodes;
  std::vector<Point> normals;
  std::vector<double> weights;
  int order = 1;  // Gauss points per panel; exact for polynomial degree 2*order-1 on axis faces

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Gauss-Legendre nodes on axis faces, equal-angle composite Gauss on arcs.
inline SurfaceQuadrature surface_quadrature(const Face& face, int order) {
  if (order < 1) throw PreconditionError("surface_quadrature: order must be >= 1");
  SurfaceQuadrature q;
  q.order = order;
  const FaceChart chart{face};
  const auto add = [&](double tau, double w) {
    q.nodes.push_back(chart.point(tau));
    q.normals.push_back(chart.normal(tau));
    q.weights.push_back(w);
  };
  if (const auto* a = std::get_if<AxisFace>(&face); a && a->dim == 1) {
    add(0.0, 1.0);
    return q;
  }
  const Interval r = chart.range();
  int panels = 1;
  if (std::holds_alternative<ArcFace>(face))
    panels = std::max(1, static_cast<int>(std::ceil(16.0 * r.length() / (2.0 * std::numbers::pi))));
  const GaussRule& rule = gauss_legendre(order);
  const double h = r.length() / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = r.lo + p * h;
    for (int i = 0; i < rule.order(); ++i)
      add(lo + 0.5 * h * (rule.nodes[i] + 1.0), 0.5 * h * rule.weights[i] * chart.jacobian());
  }
  return q;
}

enum class FoliationKind { box_inflation, concentric_sphere };

/// One leaf Gamma_y; `offset` = y * width is the signed normal distance from the base boundary.
struct Leaf {
  double y = 0.0;
  double offset = 0.0;
  Domain domain;
  std::vector<Face> boundary;
};

/// Nested family of boundaries Gamma_y, y in [-delta, 1 - delta], sweeping a
/// shell of normal thickness `width` around the base boundary.
class BoundaryFoliation {
 public:
  BoundaryFoliation(const Domain& base, double delta, double width)
      : base_(base), delta_(delta), width_(width) {
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("foliate: delta must lie in (0, 1)");
    if (!(width > 0.0)) throw PreconditionError("foliate: width must be positive");
    kind_ = std::holds_alternative<Box>(base) ? FoliationKind::box_inflation : FoliationKind::concentric_sphere;
    (void)leaf(-delta);  // innermost domain must be nonempty
  }

  FoliationKind kind() const noexcept { return kind_; }
  const Domain& base() const noexcept { return base_; }
  double delta() const noexcept { return delta_; }
  double width() const noexcept { return width_; }
  Interval parameter_range() const noexcept { return {-delta_, 1.0 - delta_}; }

  Leaf leaf(double y) const {
    const double offset = y * width_;
    Domain d = std::visit([&](const auto& b) -> Domain { return b.inflated(offset); }, base_);
    return Leaf{y, offset, d, boundary_faces(d)};
  }

  /// `count` leaves at equispaced parameters over the full range.
  std::vector<Leaf> leaves(int count) const {
    if (count < 2) throw PreconditionError("foliate: count must be >= 2");
    std::vector<Leaf> out;
    for (int k = 0; k < count; ++k) out.push_back(leaf(-delta_ + static_cast<double>(k) / (count - 1)));
    return out;
  }

 private:
  Domain base_;
  double delta_;
  double width_;
  FoliationKind kind_;
};

struct Foliation {
  BoundaryFoliation family;
  std::vector<Leaf> leaves;
};

inline Foliation foliate(const Domain& base, double delta, double width, int count) {
  BoundaryFoliation family(base, delta, width);
  auto leaves = family.leaves(count);
  return {std::move(family), std::move(leaves)};
}

}  // namespace fluxbal

#endif  // FLUXBAL_GEOMETRY_HPP_
