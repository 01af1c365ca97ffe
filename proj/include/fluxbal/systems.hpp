#ifndef FLUXBAL_SYSTEMS_HPP_
#define FLUXBAL_SYSTEMS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/fixed_vector.hpp"

namespace fluxbal {

enum class ModelKind { burgers, advection, shallow_water };

inline constexpr double kStandardGravity = 9.81;  // m/s^2

/// A conservation law u_t + div f(u) = 0 in n <= 2 space dimensions with
/// D <= 2 components. Burgers uses f_j(u) = u^2/2 in every direction.
class SystemModel {
 public:
  static SystemModel burgers(int dim) {
    check_dim(dim);
    SystemModel m;
    m.kind_ = ModelKind::burgers;
    m.dim_ = dim;
    m.components_ = 1;
    return m;
  }

  static SystemModel advection(const Point& velocity) {
    check_dim(static_cast<int>(velocity.size()));
    if (!all_finite(velocity)) throw DomainError("advection: velocity must be finite");
    SystemModel m;
    m.kind_ = ModelKind::advection;
    m.dim_ = static_cast<int>(velocity.size());
    m.components_ = 1;
    m.velocity_ = velocity;
    return m;
  }

  /// One-dimensional shallow water in (depth h [m], momentum m [m^2/s]).
  static SystemModel shallow_water(double gravity = kStandardGravity) {
    if (!(gravity > 0.0) || !std::isfinite(gravity))
      throw DomainError("shallow_water: gravity must be positive and finite");
    SystemModel m;
    m.kind_ = ModelKind::shallow_water;
    m.dim_ = 1;
    m.components_ = 2;
    m.gravity_ = gravity;
    return m;
  }

  ModelKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int components() const noexcept { return components_; }
  double gravity() const noexcept { return gravity_; }
  const Point& velocity() const noexcept { return velocity_; }

  std::string_view name() const noexcept {
    switch (kind_) {
      case ModelKind::burgers: return "burgers";
      case ModelKind::advection: return "advection";
      case ModelKind::shallow_water: return "shallow_water";
    }
    return "";
  }

  /// Throws DomainError naming the offending component.
  void check_admissible(const State& u) const {
    if (static_cast<int>(u.size()) != components_)
      throw DomainError(std::string(name()) + ": state has " + std::to_string(u.size()) +
                        " components, expected " + std::to_string(components_));
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!std::isfinite(u[i]))
        throw DomainError(std::string(name()) + ": component u_" + std::to_string(i + 1) +
                          " is not finite");
    if (kind_ == ModelKind::shallow_water && !(u[0] > 0.0))
      throw DomainError("shallow_water: depth u_1 = " + std::to_string(u[0]) +
                        " must be strictly positive");
  }

  bool admissible(const State& u) const noexcept {
    try {
      check_admissible(u);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  }

  void check_direction(const Point& d) const {
    if (static_cast<int>(d.size()) != dim_)
      throw PreconditionError("direction has dimension " + std::to_string(d.size()) +
                              ", model has " + std::to_string(dim_));
    if (std::abs(norm2(d) - 1.0) > 1e-12)
      throw PreconditionError("direction must be a unit vector (|d| = " +
                              std::to_string(norm2(d)) + ")");
  }

  /// f(u), D x n.
  FluxMatrix flux(const State& u) const {
    check_admissible(u);
    FluxMatrix f;
    f.components = components_;
    switch (kind_) {
      case ModelKind::burgers:
        f.rows[0] = Point(dim_, 0.5 * u[0] * u[0]);
        break;
      case ModelKind::advection:
        f.rows[0] = velocity_ * u[0];
        break;
      case ModelKind::shallow_water: {
        const double h = u[0], m = u[1];
        f.rows[0] = Point{m};
        f.rows[1] = Point{m * m / h + 0.5 * gravity_ * h * h};
        break;
      }
    }
    return f;
  }

  /// f(u) . d for a unit direction d.
  State directional_flux(const State& u, const Point& d) const {
    check_direction(d);
    return flux(u).contract(d);
  }

  /// Coefficient c with g(u) = c u^2 / 2 (Burgers) or g(u) = c u (advection).
  double scalar_coefficient(const Point& d) const {
    switch (kind_) {
      case ModelKind::burgers: {
        double c = 0.0;
        for (double v : d) c += v;
        return c;
      }
      case ModelKind::advection: return dot(velocity_, d);
      case ModelKind::shallow_water: break;
    }
    throw PreconditionError("scalar_coefficient: shallow_water is not scalar");
  }

  /// Characteristic speeds of the directional flux d . f at u.
  std::vector<double> characteristic_speeds(const State& u, const Point& d) const {
    check_admissible(u);
    check_direction(d);
    switch (kind_) {
      case ModelKind::burgers: return {scalar_coefficient(d) * u[0]};
      case ModelKind::advection: return {scalar_coefficient(d)};
      case ModelKind::shallow_water: {
        const double v = d[0] * u[1] / u[0];
        const double c = std::sqrt(gravity_ * u[0]);
        return {v - c, v + c};
      }
    }
    return {};
  }

  /// Nonnegative bound on |lambda| over the characteristic speeds in direction d.
  double max_speed(const State& u, const Point& d) const {
    check_admissible(u);
    check_direction(d);
    switch (kind_) {
      case ModelKind::burgers: return std::abs(u[0]) * std::abs(scalar_coefficient(d));
      case ModelKind::advection: return std::abs(scalar_coefficient(d));
      case ModelKind::shallow_water:
        return std::abs(u[1] / u[0]) + std::sqrt(gravity_ * u[0]);
    }
    return 0.0;
  }

 private:
  static void check_dim(int dim) {
    if (dim < 1 || dim > static_cast<int>(kMaxDim))
      throw DomainError("spatial dimension must be 1 or 2, got " + std::to_string(dim));
  }

  ModelKind kind_ = ModelKind::burgers;
  int dim_ = 1;
  int components_ = 1;
  double gravity_ = kStandardGravity;
  Point velocity_{};
};

inline FluxMatrix flux_eval(const SystemModel& model, const State& u) { return model.flux(u); }

inline State directional_flux(const SystemModel& model, const State& u, const Point& d) {
  return model.directional_flux(u, d);
}

enum class WaveKind { shock, contact, rarefaction };

/// One elementary wave of a Riemann solution. Shocks and contacts have
/// speed_lo == speed_hi; fans span [speed_lo, speed_hi].
struct Wave {
  WaveKind kind;
  double speed_lo;
  double speed_hi;
  State left;
  State right;
};

/// Self-similar solution w(xi) of a 1D Riemann problem for g(w) = d . f(w).
/// The solution is piecewise: constant states and rarefaction fans separated
/// by breakpoints in xi. At a discontinuity the left state is returned.
class RiemannSolution {
 public:
  enum class SegmentKind { constant, burgers_fan, sw_left_fan, sw_right_fan };
  struct Segment {
    SegmentKind kind = SegmentKind::constant;
    State state{};     // constant value
    double param = 0;  // burgers: coefficient c; shallow water: u +- 2c invariant
  };

  RiemannSolution() = default;
  RiemannSolution(std::vector<double> breaks, std::vector<Segment> segments, std::vector<Wave> waves,
                  double gravity, bool reflected)
      : breaks_(std::move(breaks)),
        segments_(std::move(segments)),
        waves_(std::move(waves)),
        gravity_(gravity),
        reflected_(reflected) {}

  State sample(double xi) const {
    if (!reflected_) {
      const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), xi);
      return eval(segments_[static_cast<std::size_t>(it - breaks_.begin())], xi);
    }
    const double base = -xi;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), base);
    return eval(segments_[static_cast<std::size_t>(it - breaks_.begin())], base);
  }

  /// Sorted breakpoints in physical xi.
  std::vector<double> breakpoints() const {
    if (!reflected_) return breaks_;
    std::vector<double> out(breaks_.rbegin(), breaks_.rend());
    for (double& b : out) b = -b;
    return out;
  }

  /// Solution of the mirrored problem: xi -> -xi with left and right swapped.
  RiemannSolution mirrored() const {
    RiemannSolution out = *this;
    out.reflected_ = !reflected_;
    return out;
  }

  /// True when xi lies inside a rarefaction fan.
  bool is_fan_at(double xi) const {
    const double base = reflected_ ? -xi : xi;
    const auto it = reflected_ ? std::upper_bound(breaks_.begin(), breaks_.end(), base)
                               : std::lower_bound(breaks_.begin(), breaks_.end(), base);
    return segments_[static_cast<std::size_t>(it - breaks_.begin())].kind != SegmentKind::constant;
  }

  /// Waves in physical left-to-right order, speeds in physical xi.
  std::vector<Wave> waves() const {
    if (!reflected_) return waves_;
    std::vector<Wave> out;
    for (auto it = waves_.rbegin(); it != waves_.rend(); ++it)
      out.push_back(Wave{it->kind, -it->speed_hi, -it->speed_lo, it->right, it->left});
    return out;
  }

  /// States visited by the solution; fans are sampled at `per_fan` points.
  std::vector<State> visited_states(int per_fan = 65) const {
    std::vector<State> out;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const Segment& s = segments_[k];
      if (s.kind == SegmentKind::constant) {
        out.push_back(s.state);
        continue;
      }
      const double lo = breaks_[k - 1], hi = breaks_[k];
      for (int i = 0; i < per_fan; ++i) out.push_back(eval(s, lo + (hi - lo) * i / (per_fan - 1)));
    }
    return out;
  }

 private:
  State eval(const Segment& s, double xi) const {
    switch (s.kind) {
      case SegmentKind::constant: return s.state;
      case SegmentKind::burgers_fan: return State{xi / s.param};
      case SegmentKind::sw_left_fan: {
        const double c = (s.param - xi) / 3.0;
        const double v = (s.param + 2.0 * xi) / 3.0;
        const double h = c * c / gravity_;
        return State{h, h * v};
      }
      case SegmentKind::sw_right_fan: {
        const double c = (xi - s.param) / 3.0;
        const double v = (s.param + 2.0 * xi) / 3.0;
        const double h = c * c / gravity_;
        return State{h, h * v};
      }
    }
    return s.state;
  }

  std::vector<double> breaks_;
  std::vector<Segment> segments_;
  std::vector<Wave> waves_;
  double gravity_ = kStandardGravity;
  bool reflected_ = false;
};

struct NewtonOptions {
  double tolerance = 1e-12;  // relative depth change
  int max_iterations = 100;
};

namespace detail {

inline RiemannSolution scalar_riemann(const SystemModel& model, const State& ul, const State& ur,
                                      const Point& d) {
  using Seg = RiemannSolution::Segment;
  using Kind = RiemannSolution::SegmentKind;
  const double c = model.scalar_coefficient(d);
  const double g = model.gravity();
  if (model.kind() == ModelKind::advection || c == 0.0) {
    return RiemannSolution({c}, {Seg{Kind::constant, ul, 0}, Seg{Kind::constant, ur, 0}},
                           {Wave{WaveKind::contact, c, c, ul, ur}}, g, false);
  }
  // Burgers in v = c u: characteristic speed is v itself.
  const double vl = c * ul[0], vr = c * ur[0];
  if (vl > vr) {
    const double s = 0.5 * (vl + vr);
    return RiemannSolution({s}, {Seg{Kind::constant, ul, 0}, Seg{Kind::constant, ur, 0}},
                           {Wave{WaveKind::shock, s, s, ul, ur}}, g, false);
  }
  if (vl == vr) {
    return RiemannSolution({vl}, {Seg{Kind::constant, ul, 0}, Seg{Kind::constant, ur, 0}},
                           {Wave{WaveKind::contact, vl, vl, ul, ur}}, g, false);
  }
  return RiemannSolution(
      {vl, vr},
      {Seg{Kind::constant, ul, 0}, Seg{Kind::burgers_fan, {}, c}, Seg{Kind::constant, ur, 0}},
      {Wave{WaveKind::rarefaction, vl, vr, ul, ur}}, g, false);
}

// Depth function f_K(h) and its derivative for the shallow-water star state.
struct DepthFunction {
  double value;
  double slope;
};

inline DepthFunction depth_function(double h, double hk, double g) {
  if (h <= hk) {
    const double ck = std::sqrt(g * hk);
    return {2.0 * (std::sqrt(g * h) - ck), std::sqrt(g / h)};
  }
  const double gk = std::sqrt(0.5 * g * (1.0 / h + 1.0 / hk));
  return {(h - hk) * gk, gk - (h - hk) * g / (4.0 * gk * h * h)};
}

inline RiemannSolution shallow_water_riemann(const SystemModel& model, const State& ul,
                                             const State& ur, const NewtonOptions& opt) {
  using Seg = RiemannSolution::Segment;
  using Kind = RiemannSolution::SegmentKind;
  const double g = model.gravity();
  const double hl = ul[0], hr = ur[0];
  const double vl = ul[1] / hl, vr = ur[1] / hr;
  const double cl = std::sqrt(g * hl), cr = std::sqrt(g * hr);
  if (2.0 * (cl + cr) <= vr - vl)
    throw DomainError("shallow_water: Riemann data generate a dry (vacuum) state");

  // Two-rarefaction initial guess.
  const double root = 0.5 * (cl + cr) - 0.25 * (vr - vl);
  double h = root * root / g;
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const DepthFunction fl = depth_function(h, hl, g);
    const DepthFunction fr = depth_function(h, hr, g);
    const double residual = fl.value + fr.value + (vr - vl);
    double next = h - residual / (fl.slope + fr.slope);
    if (!(next > 0.0)) next = 0.5 * h;
    const double change = std::abs(next - h);
    h = next;
    if (change <= opt.tolerance * h) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SolverError("shallow_water: star-depth Newton iteration did not converge", h);

  const double fl = depth_function(h, hl, g).value;
  const double fr = depth_function(h, hr, g).value;
  const double vs = 0.5 * (vl + vr) + 0.5 * (fr - fl);
  const double cs = std::sqrt(g * h);
  const State star{h, h * vs};

  std::vector<double> breaks;
  std::vector<Seg> segs{Seg{Kind::constant, ul, 0}};
  std::vector<Wave> waves;
  if (h > hl) {
    const double s = vl - cl * std::sqrt(0.5 * (h + hl) * h / (hl * hl));
    breaks.push_back(s);
    waves.push_back(Wave{WaveKind::shock, s, s, ul, star});
  } else {
    breaks.push_back(vl - cl);
    breaks.push_back(vs - cs);
    segs.push_back(Seg{Kind::sw_left_fan, {}, vl + 2.0 * cl});
    waves.push_back(Wave{WaveKind::rarefaction, vl - cl, vs - cs, ul, star});
  }
  segs.push_back(Seg{Kind::constant, star, 0});
  if (h > hr) {
    const double s = vr + cr * std::sqrt(0.5 * (h + hr) * h / (hr * hr));
    breaks.push_back(s);
    waves.push_back(Wave{WaveKind::shock, s, s, star, ur});
  } else {
    breaks.push_back(vs + cs);
    breaks.push_back(vr + cr);
    segs.push_back(Seg{Kind::sw_right_fan, {}, vr - 2.0 * cr});
    waves.push_back(Wave{WaveKind::rarefaction, vs + cs, vr + cr, star, ur});
  }
  segs.push_back(Seg{Kind::constant, ur, 0});
  return RiemannSolution(std::move(breaks), std::move(segs), std::move(waves), g, false);
}

}  // namespace detail

/// Entropy solution of the Riemann problem for the directional flux d . f.
inline RiemannSolution solve_riemann(const SystemModel& model, const State& ul, const State& ur,
                                     const Point& d, const NewtonOptions& opt = {}) {
  model.check_admissible(ul);
  model.check_admissible(ur);
  model.check_direction(d);
  if (model.kind() != ModelKind::shallow_water) return detail::scalar_riemann(model, ul, ur, d);
  if (d[0] > 0.0) return detail::shallow_water_riemann(model, ul, ur, opt);
  // g = -f: w_g(xi; ul, ur) = w_f(-xi; ur, ul).
  return detail::shallow_water_riemann(model, ur, ul, opt).mirrored();
}

/// w(xi) of the Riemann solution.
inline State riemann_solve(const SystemModel& model, const State& ul, const State& ur,
                           const Point& d, double xi) {
  return solve_riemann(model, ul, ur, d).sample(xi);
}

/// Godunov flux: the directional flux of the Riemann solution on xi = 0.
inline State godunov_flux(const SystemModel& model, const State& ul, const State& ur,
                          const Point& d) {
  return model.directional_flux(riemann_solve(model, ul, ur, d, 0.0), d);
}

}  // namespace fluxbal

#endif  // FLUXBAL_SYSTEMS_HPP_
