#ifndef FLUXBAL_EXACT_HPP_
#define FLUXBAL_EXACT_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/fixed_vector.hpp"
#include "fluxbal/geometry.hpp"
#include "fluxbal/quadrature.hpp"
#include "fluxbal/systems.hpp"

namespace fluxbal {

/// A value with an absolute error estimate.
struct Estimate {
  State value;
  double error = 0.0;
};

inline constexpr double kOracleTolerance = 1e-10;

/// u(x, t) = w((x . nu - x0) / t): a single Riemann wave pattern in direction nu.
class PlanarWeakSolution {
 public:
  PlanarWeakSolution(SystemModel model, Point normal, double offset, State left, State right)
      : model_(std::move(model)), normal_(normal), offset_(offset), left_(left), right_(right) {
    model_.check_direction(normal_);
    riemann_ = solve_riemann(model_, left_, right_, normal_);
    breaks_ = riemann_.breakpoints();
  }

  const SystemModel& model() const noexcept { return model_; }
  const Point& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }
  const State& left() const noexcept { return left_; }
  const State& right() const noexcept { return right_; }
  const RiemannSolution& riemann() const noexcept { return riemann_; }
  /// Wave breakpoints in similarity coordinate, sorted.
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  int components() const noexcept { return model_.components(); }
  int dim() const noexcept { return model_.dim(); }

  /// Signed distance to the initial interface.
  double sigma(const Point& x) const noexcept { return dot(x, normal_) - offset_; }

  /// Value at signed distance sigma and time t; t = 0 gives the initial data.
  State profile(double sigma, double t) const {
    if (t <= 0.0) return sigma <= 0.0 ? left_ : right_;
    return riemann_.sample(sigma / t);
  }

  State sample(const Point& x, double t) const {
    if (t < 0.0) throw PreconditionError("sample: t must be >= 0");
    return profile(sigma(x), t);
  }

  /// C_Q: sup |u| over all states the solution takes.
  double sup_norm() const {
    double c = 0.0;
    for (const State& s : riemann_.visited_states()) c = std::max(c, norm2(s));
    return c;
  }

  /// Per component, sup over visited states of |f_i(u)| (Euclidean in R^n);
  /// bounds |f_i(u) . nu| for every unit nu.
  State flux_bound() const {
    State b(components(), 0.0);
    for (const State& s : riemann_.visited_states()) {
      const FluxMatrix f = model_.flux(s);
      for (int i = 0; i < components(); ++i) b[i] = std::max(b[i], norm2(f.rows[i]));
    }
    return b;
  }

 private:
  SystemModel model_;
  Point normal_;
  double offset_;
  State left_, right_;
  RiemannSolution riemann_;
  std::vector<double> breaks_;
};

/// Ordered times in (t1, t2) at which a wave edge passes a point.
struct WaveEventList {
  std::vector<double> times;
};

inline WaveEventList wave_events(const PlanarWeakSolution& sol, double sigma, double t1, double t2) {
  WaveEventList ev;
  if (sigma == 0.0) return ev;
  for (double b : sol.breakpoints()) {
    if (b == 0.0 || (b > 0.0) != (sigma > 0.0)) continue;
    const double t = sigma / b;
    if (t > t1 && t < t2) ev.times.push_back(t);
  }
  std::sort(ev.times.begin(), ev.times.end());
  ev.times.erase(std::unique(ev.times.begin(), ev.times.end()), ev.times.end());
  return ev;
}

inline WaveEventList wave_events(const PlanarWeakSolution& sol, const Point& x, double t1, double t2) {
  return wave_events(sol, sol.sigma(x), t1, t2);
}

namespace detail {

// Length of {x in box : x . nu = s}.
inline double chord_length(const Box& box, const Point& nu, double s) {
  if (box.dim() == 1) {
    const double x = s / nu[0];
    return box.side(0).contains(x) ? 1.0 : 0.0;
  }
  const Point tangent{-nu[1], nu[0]};
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const Interval side = box.side(i);
    if (std::abs(tangent[i]) < 1e-15) {
      if (!side.contains(s * nu[i])) return 0.0;
      continue;
    }
    double a = (side.lo - s * nu[i]) / tangent[i];
    double b = (side.hi - s * nu[i]) / tangent[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return std::max(0.0, hi - lo);
}

inline std::vector<double> front_positions(const PlanarWeakSolution& sol, double t) {
  // Sigma values of the wave edges at time t.
  if (t <= 0.0) return {0.0};
  std::vector<double> out;
  for (double b : sol.breakpoints()) out.push_back(b * t);
  return out;
}

inline void require(const QuadResult<State>& q, const char* what) {
  if (!q.converged) throw AccuracyError(what, q.error);
}

}  // namespace detail

/// Integral of u(., t) over a box or disk.
inline Estimate mass_estimate(const PlanarWeakSolution& sol, const Domain& domain, double t,
                              double tol = kOracleTolerance) {
  if (t < 0.0) throw PreconditionError("mass: t must be >= 0");
  const State zero(sol.components(), 0.0);
  if (domain_volume(domain) == 0.0) return {zero, 0.0};
  const Point& nu = sol.normal();
  const std::vector<double> fronts = detail::front_positions(sol, t);

  if (const auto* box = std::get_if<Box>(&domain)) {
    if (box->dim() != sol.dim()) throw PreconditionError("mass: domain dimension mismatch");
    // Integrate along s = x . nu against the chord length.
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    std::vector<double> breaks;
    const int corners = box->dim() == 1 ? 2 : 4;
    for (int c = 0; c < corners; ++c) {
      Point p(box->dim());
      p[0] = (c & 1) ? box->side(0).hi : box->side(0).lo;
      if (box->dim() == 2) p[1] = (c & 2) ? box->side(1).hi : box->side(1).lo;
      const double s = dot(p, nu);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      breaks.push_back(s);
    }
    for (double f : fronts) breaks.push_back(f + sol.offset());
    const auto integrand = [&](double s) {
      return sol.profile(s - sol.offset(), t) * detail::chord_length(*box, nu, s);
    };
    auto q = adaptive_gauss_split(integrand, smin, smax, breaks, tol);
    detail::require(q, "mass: quadrature tolerance not met");
    return {q.value, q.error};
  }

  // Disk: s = c . nu + R sin(theta) removes the chord's square-root endpoints.
  const auto& disk = std::get<Disk>(domain);
  if (sol.dim() != 2) throw PreconditionError("mass: disk requires a 2D solution");
  const double cn = dot(disk.center, nu);
  const double r = disk.radius;
  std::vector<double> breaks;
  for (double f : fronts) {
    const double q = (f + sol.offset() - cn) / r;
    if (q > -1.0 && q < 1.0) breaks.push_back(std::asin(q));
  }
  const auto integrand = [&](double th) {
    const double c = std::cos(th);
    return sol.profile(cn + r * std::sin(th) - sol.offset(), t) * (2.0 * r * r * c * c);
  };
  auto q = adaptive_gauss_split(integrand, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, breaks, tol);
  detail::require(q, "mass: quadrature tolerance not met");
  return {q.value, q.error};
}

inline State mass(const PlanarWeakSolution& sol, const Domain& domain, double t,
                  double tol = kOracleTolerance) {
  return mass_estimate(sol, domain, t, tol).value;
}

/// int_{t1}^{t2} f(u(x, t)) . nu dt at a point with signed distance sigma.
inline Estimate time_integrated_flux(const PlanarWeakSolution& sol, double sigma, const Point& nu,
                                     double t1, double t2, double tol) {
  const SystemModel& model = sol.model();
  State zero(sol.components(), 0.0);
  if (!(t2 > t1)) return {zero, 0.0};
  const auto flux_at = [&](double t) { return model.flux(sol.profile(sigma, t)).contract(nu); };
  if (sigma == 0.0) return {model.flux(sol.riemann().sample(0.0)).contract(nu) * (t2 - t1), 0.0};

  std::vector<double> cuts{t1};
  for (double te : wave_events(sol, sigma, t1, t2).times) cuts.push_back(te);
  cuts.push_back(t2);
  Estimate out{zero, 0.0};
  const double span = t2 - t1;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double mid = 0.5 * (a + b);
    if (!sol.riemann().is_fan_at(sigma / mid)) {
      out.value += flux_at(mid) * (b - a);
      continue;
    }
    auto q = adaptive_gauss(flux_at, a, b, tol * (b - a) / span);
    detail::require(q, "exact_face_flux: time quadrature tolerance not met");
    out.value += q.value;
    out.error += q.error;
  }
  return out;
}

/// int_{t1}^{t2} int_face f(u) . nu dS dt. Time integration is split at wave
/// crossings; the surface integral is split where the time integral has kinks.
inline Estimate exact_face_flux(const PlanarWeakSolution& sol, const Face& face, double t1, double t2,
                                double tol = kOracleTolerance) {
  if (!(t1 >= 0.0 && t1 <= t2)) throw PreconditionError("exact_face_flux: need 0 <= t1 <= t2");
  const FaceChart chart{face};
  const State zero(sol.components(), 0.0);
  if (t1 == t2) return {zero, 0.0};
  const Point& nh = sol.normal();

  if (const auto* a = std::get_if<AxisFace>(&face); a && a->dim == 1) {
    if (sol.dim() != 1) throw PreconditionError("exact_face_flux: dimension mismatch");
    return time_integrated_flux(sol, sol.sigma(chart.point(0.0)), chart.normal(0.0), t1, t2, tol);
  }
  if (sol.dim() != 2) throw PreconditionError("exact_face_flux: dimension mismatch");

  std::vector<double> kinks{0.0};
  for (double b : sol.breakpoints()) {
    kinks.push_back(b * t1);
    kinks.push_back(b * t2);
  }
  const Interval range = chart.range();
  std::vector<double> breaks;
  if (const auto* a = std::get_if<AxisFace>(&face)) {
    const int other = 1 - a->axis;
    if (std::abs(nh[other]) > 0.0)
      for (double k : kinks) breaks.push_back((k + sol.offset() - a->position * nh[a->axis]) / nh[other]);
  } else {
    const auto& arc = std::get<ArcFace>(face);
    const double phi = std::atan2(nh[1], nh[0]);
    const double cn = dot(arc.center, nh);
    const double two_pi = 2.0 * std::numbers::pi;
    const auto wrap = [&](double th) {
      while (th < range.lo) th += two_pi;
      while (th >= range.lo + two_pi) th -= two_pi;
      return th;
    };
    breaks.push_back(wrap(phi));
    breaks.push_back(wrap(phi + std::numbers::pi));
    for (double k : kinks) {
      const double q = (k + sol.offset() - cn) / arc.radius;
      if (q > -1.0 && q < 1.0) {
        breaks.push_back(wrap(phi + std::acos(q)));
        breaks.push_back(wrap(phi - std::acos(q)));
      }
    }
  }

  const double measure = face_measure(face);
  const double inner_tol = measure > 0.0 ? 0.5 * tol / measure : tol;
  double worst_inner = 0.0;
  const double jac = chart.jacobian();
  const auto integrand = [&](double tau) {
    const Point x = chart.point(tau);
    Estimate e = time_integrated_flux(sol, sol.sigma(x), chart.normal(tau), t1, t2, inner_tol);
    worst_inner = std::max(worst_inner, e.error);
    return e.value * jac;
  };
  auto q = adaptive_gauss_split(integrand, range.lo, range.hi, breaks, 0.5 * tol);
  detail::require(q, "exact_face_flux: surface quadrature tolerance not met");
  return {q.value, q.error + measure * worst_inner};
}

/// Compactly supported test function phi_i = p_i(x, t) B(x, t) with
/// B a product of (1 - s^2)^4 bumps and p_i affine.
struct BumpTestFunction {
  Point center;
  Point radius;
  double t_center = 0.5;
  double t_radius = 0.25;
  std::size_t components = 1;
  std::array<double, kMaxComponents> a0{};
  std::array<Point, kMaxComponents> ax{};
  std::array<double, kMaxComponents> at{};

  static double bump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q * q * q;
  }
  static double dbump(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return -8.0 * s * q * q * q;
  }

  /// Support strictly inside box x (t1, t2), center and radii drawn at random.
  static BumpTestFunction random(std::mt19937_64& rng, const Box& box, double t1, double t2,
                                 std::size_t components) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    BumpTestFunction phi;
    phi.components = components;
    const int n = box.dim();
    phi.center = Point(n);
    phi.radius = Point(n);
    for (int j = 0; j < n; ++j) {
      const Interval s = box.side(j);
      const double r = (0.15 + 0.3 * unit(rng)) * s.length();
      phi.radius[j] = r;
      phi.center[j] = s.lo + r + (s.length() - 2.0 * r) * (0.02 + 0.96 * unit(rng));
    }
    const double tr = (0.15 + 0.3 * unit(rng)) * (t2 - t1);
    phi.t_radius = tr;
    phi.t_center = t1 + tr + (t2 - t1 - 2.0 * tr) * (0.02 + 0.96 * unit(rng));
    for (std::size_t i = 0; i < components; ++i) {
      phi.a0[i] = coef(rng);
      phi.ax[i] = Point(n);
      for (int j = 0; j < n; ++j) phi.ax[i][j] = coef(rng) / phi.radius[j];
      phi.at[i] = coef(rng) / tr;
    }
    return phi;
  }

  int dim() const { return static_cast<int>(center.size()); }

  struct Derivatives {
    State dt;                                // d phi_i / dt
    std::array<Point, kMaxComponents> grad;  // grad_x phi_i
  };

  Derivatives derivatives(const Point& x, double t) const {
    const int n = dim();
    std::array<double, kMaxDim> s{}, b{}, db{};
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      s[j] = (x[j] - center[j]) / radius[j];
      b[j] = bump(s[j]);
      db[j] = dbump(s[j]) / radius[j];
      prod *= b[j];
    }
    const double st = (t - t_center) / t_radius;
    const double bt = bump(st), dbt = dbump(st) / t_radius;
    const double B = prod * bt;
    Derivatives d;
    d.dt = State(components);
    Point dB(n);
    for (int j = 0; j < n; ++j) {
      double others = bt;
      for (int k = 0; k < n; ++k)
        if (k != j) others *= b[k];
      dB[j] = db[j] * others;
    }
    const double dBdt = prod * dbt;
    for (std::size_t i = 0; i < components; ++i) {
      double p = a0[i] + at[i] * (t - t_center);
      for (int j = 0; j < n; ++j) p += ax[i][j] * (x[j] - center[j]);
      d.dt[i] = at[i] * B + p * dBdt;
      d.grad[i] = ax[i] * B + dB * p;
    }
    return d;
  }
};

/// Space-time cylinder Q = box x [t1, t2].
struct Cylinder {
  Box box;
  double t1 = 0.0;
  double t2 = 1.0;
};

/// |sum_i int_Q [u_i dphi_i/dt + f_i(u) . grad phi_i] dx dt| with the flux of
/// `model` applied to the field `sol`; the two differ only in negative controls.
inline double weak_form_residual(const SystemModel& model, const PlanarWeakSolution& sol,
                                 const BumpTestFunction& phi, const Cylinder& q, double tol = 1e-11) {
  if (q.box.dim() != sol.dim() || phi.dim() != sol.dim() || model.dim() != sol.dim())
    throw PreconditionError("weak_form_residual: dimension mismatch");
  const Point& nh = sol.normal();
  const int n = sol.dim();
  const AdaptiveOptions opt{8, 2000};

  const auto integrand = [&](const Point& x, double t) {
    const State u = sol.sample(x, t);
    const FluxMatrix f = model.flux(u);
    const auto d = phi.derivatives(x, t);
    double v = 0.0;
    for (std::size_t i = 0; i < phi.components; ++i) v += u[i] * d.dt[i] + dot(f.rows[i], d.grad[i]);
    return v;
  };

  // Support of phi intersected with Q.
  const double ta = std::max(q.t1, phi.t_center - phi.t_radius);
  const double tb = std::min(q.t2, phi.t_center + phi.t_radius);
  std::array<Interval, kMaxDim> sup{};
  for (int j = 0; j < n; ++j)
    sup[j] = {std::max(q.box.side(j).lo, phi.center[j] - phi.radius[j]),
              std::min(q.box.side(j).hi, phi.center[j] + phi.radius[j])};

  // Innermost axis: the one most aligned with the wave normal.
  const int inner = (n == 2 && std::abs(nh[1]) > std::abs(nh[0])) ? 1 : 0;
  const int outer = 1 - inner;

  const auto inner_integral = [&](double t, double xo) {
    std::vector<double> breaks;
    for (double b : sol.breakpoints()) {
      double rest = sol.offset() + b * t;
      if (n == 2) rest -= nh[outer] * xo;
      breaks.push_back(rest / nh[inner]);
    }
    const auto f = [&](double xi) {
      Point x(n);
      x[inner] = xi;
      if (n == 2) x[outer] = xo;
      return integrand(x, t);
    };
    return adaptive_gauss_split(f, sup[inner].lo, sup[inner].hi, breaks, tol, opt).value;
  };

  // Corners of the spatial support, used to locate kinks in the outer integrands.
  std::vector<Point> corners;
  for (int c = 0; c < (n == 1 ? 2 : 4); ++c) {
    Point p(n);
    p[0] = (c & 1) ? sup[0].hi : sup[0].lo;
    if (n == 2) p[1] = (c & 2) ? sup[1].hi : sup[1].lo;
    corners.push_back(p);
  }
  std::vector<double> tbreaks;
  for (double b : sol.breakpoints())
    if (b != 0.0)
      for (const Point& p : corners) tbreaks.push_back(sol.sigma(p) / b);

  const auto time_slice = [&](double t) {
    if (n == 1) return inner_integral(t, 0.0);
    std::vector<double> breaks;
    if (std::abs(nh[outer]) > 0.0)
      for (double b : sol.breakpoints())
        for (double xi : {sup[inner].lo, sup[inner].hi})
          breaks.push_back((sol.offset() + b * t - nh[inner] * xi) / nh[outer]);
    const auto g = [&](double xo) { return inner_integral(t, xo); };
    return adaptive_gauss_split(g, sup[outer].lo, sup[outer].hi, breaks, tol, opt).value;
  };
  const auto total = adaptive_gauss_split(time_slice, ta, tb, tbreaks, tol, opt);
  return std::abs(total.value);
}

inline double weak_form_residual(const PlanarWeakSolution& sol, const BumpTestFunction& phi, const Cylinder& q,
                                 double tol = 1e-11) {
  return weak_form_residual(sol.model(), sol, phi, q, tol);
}

/// Smooth periodic solution of linear advection:
/// u(x, t) = mean + amplitude sin(2 pi k . (x - a t)).
class SineAdvectionSolution {
 public:
  SineAdvectionSolution(SystemModel model, double mean, double amplitude, Point wavenumber)
      : model_(std::move(model)), mean_(mean), amplitude_(amplitude), k_(wavenumber) {
    if (model_.kind() != ModelKind::advection)
      throw PreconditionError("SineAdvectionSolution requires the advection model");
    if (static_cast<int>(k_.size()) != model_.dim())
      throw PreconditionError("SineAdvectionSolution: wavenumber dimension mismatch");
  }

  const SystemModel& model() const noexcept { return model_; }
  int components() const noexcept { return 1; }
  int dim() const noexcept { return model_.dim(); }

  State sample(const Point& x, double t) const {
    const Point& a = model_.velocity();
    return State{mean_ + amplitude_ * std::sin(2.0 * std::numbers::pi * dot(k_, x - a * t))};
  }

  State mass(const Box& box, double t) const {
    std::complex<double> prod = std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * dot(k_, model_.velocity()) * t));
    for (int j = 0; j < box.dim(); ++j) prod *= phase_integral(k_[j], box.side(j));
    return State{mean_ * box.volume() + amplitude_ * prod.imag()};
  }

  Estimate face_flux(const AxisFace& face, double t1, double t2) const {
    const Point& a = model_.velocity();
    const double speed = a[face.axis] * face.orientation;
    const double measure = face.dim == 1 ? 1.0 : face.cross.length();
    std::complex<double> z = std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * k_[face.axis] * face.position));
    if (face.dim == 2) z *= phase_integral(k_[1 - face.axis], face.cross);
    z *= phase_integral(-dot(k_, a), Interval{t1, t2});
    return {State{speed * (mean_ * (t2 - t1) * measure + amplitude_ * z.imag())}, 0.0};
  }

 private:
  // int_lo^hi exp(i 2 pi k x) dx
  static std::complex<double> phase_integral(double k, const Interval& iv) {
    if (k == 0.0) return iv.length();
    const double w = 2.0 * std::numbers::pi * k;
    const std::complex<double> i(0.0, 1.0);
    return (std::exp(i * (w * iv.hi)) - std::exp(i * (w * iv.lo))) / (i * w);
  }

  SystemModel model_;
  double mean_;
  double amplitude_;
  Point k_;
};

}  // namespace fluxbal

#endif  // FLUXBAL_EXACT_HPP_
