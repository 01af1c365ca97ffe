#ifndef FLUXBAL_TRACE_HPP_
#define FLUXBAL_TRACE_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <string_view>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/exact.hpp"
#include "fluxbal/geometry.hpp"

namespace fluxbal {

enum class Provenance { quadrature, ledger };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::quadrature ? "quadrature" : "ledger";
}

/// Anything that can report time-integrated fluxes through faces.
template <class S>
concept FluxSampler = requires(const S& s, const Face& f, double t1, double t2, double tol) {
  { s.face_flux(f, t1, t2, tol) } -> std::same_as<Estimate>;
  { s.components() } -> std::convertible_to<int>;
  { s.provenance() } -> std::same_as<Provenance>;
};

/// Analytic sampler backed by a planar weak solution.
class OracleSampler {
 public:
  explicit OracleSampler(const PlanarWeakSolution& sol) : sol_(&sol) {}
  Estimate face_flux(const Face& f, double t1, double t2, double tol) const {
    return exact_face_flux(*sol_, f, t1, t2, tol);
  }
  Estimate mass(const Domain& d, double t, double tol) const { return mass_estimate(*sol_, d, t, tol); }
  int components() const { return sol_->components(); }
  Provenance provenance() const { return Provenance::quadrature; }
  const PlanarWeakSolution& solution() const { return *sol_; }

 private:
  const PlanarWeakSolution* sol_;
};

/// h(y; t1, t2): outward flux through a closed boundary (positive = leaving).
struct FluxTrace {
  State value;
  double y = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  Provenance provenance = Provenance::quadrature;
  double error_estimate = 0.0;
};

template <FluxSampler S>
FluxTrace flux_trace(const S& sampler, const std::vector<Face>& boundary, double t1, double t2, double tol,
                     double y = 0.0) {
  if (t1 > t2) throw PreconditionError("flux_trace: t1 must not exceed t2");
  FluxTrace tr;
  tr.value = State(sampler.components(), 0.0);
  tr.y = y;
  tr.t1 = t1;
  tr.t2 = t2;
  tr.provenance = sampler.provenance();
  if (boundary.empty()) return tr;
  const double share = tol / static_cast<double>(boundary.size());
  for (const Face& f : boundary) {
    const Estimate e = sampler.face_flux(f, t1, t2, share);
    tr.value += e.value;
    tr.error_estimate += e.error;
  }
  if (tr.error_estimate > tol) throw AccuracyError("flux_trace: tolerance not met", tr.error_estimate);
  return tr;
}

/// Traces sampled along a one-parameter family. `coordinate` is the abscissa
/// for differences: normal distance for foliations, x_j for face profiles.
struct TraceProfile {
  std::vector<double> coordinate;
  std::vector<FluxTrace> traces;
  double t1 = 0.0;
  double t2 = 0.0;
  double tol = 0.0;
  std::size_t size() const { return traces.size(); }
};

/// flux_trace at K + 1 equispaced parameters y in [-delta, 1 - delta].
template <FluxSampler S>
TraceProfile trace_profile(const S& sampler, const BoundaryFoliation& foliation, double t1, double t2, int K,
                           double tol) {
  if (K < 2) throw PreconditionError("trace_profile: K must be >= 2");
  TraceProfile p;
  p.t1 = t1;
  p.t2 = t2;
  p.tol = tol;
  const Interval range = foliation.parameter_range();
  for (int k = 0; k <= K; ++k) {
    const double y = range.lo + range.length() * k / K;
    const Leaf leaf = foliation.leaf(y);
    p.coordinate.push_back(leaf.offset);
    p.traces.push_back(flux_trace(sampler, leaf.boundary, t1, t2, tol, y));
  }
  return p;
}

/// F^j(x_j; t1, t2) through the section of `box` at each position, oriented along +e_j.
template <FluxSampler S>
TraceProfile face_flux_profile(const S& sampler, const Box& box, int axis, const std::vector<double>& positions,
                               double t1, double t2, double tol) {
  if (axis < 0 || axis >= box.dim()) throw PreconditionError("face_flux_profile: axis out of range");
  TraceProfile p;
  p.t1 = t1;
  p.t2 = t2;
  p.tol = tol;
  const Interval cross = box.dim() == 2 ? box.side(1 - axis) : Interval{};
  for (double x : positions) {
    const Face face = AxisFace{box.dim(), axis, x, +1, cross};
    p.coordinate.push_back(x);
    p.traces.push_back(flux_trace(sampler, std::vector<Face>{face}, t1, t2, tol, x));
  }
  return p;
}

struct LipschitzLevel {
  int intervals = 0;  // K
  State constant;
};

/// First-difference Lipschitz estimate with its history under subsampling.
struct LipschitzReport {
  State constant;
  std::vector<LipschitzLevel> history;  // increasing K
  std::optional<State> analytic;
};

namespace detail {

inline State max_first_difference(const TraceProfile& p, std::size_t stride) {
  State L(p.traces.front().value.size(), 0.0);
  for (std::size_t k = 0; k + stride < p.size(); k += stride) {
    const double dy = p.coordinate[k + stride] - p.coordinate[k];
    if (dy <= 0.0) continue;
    const State dh = p.traces[k + stride].value - p.traces[k].value;
    for (std::size_t i = 0; i < L.size(); ++i) L[i] = std::max(L[i], std::abs(dh[i]) / dy);
  }
  return L;
}

}  // namespace detail

/// max_k |h(y_{k+1}) - h(y_k)| / (y_{k+1} - y_k) per component. The history
/// is built from every stride 2^m that divides K and leaves at least two intervals.
inline LipschitzReport estimate_lipschitz(const TraceProfile& profile, std::optional<State> analytic = {}) {
  if (profile.size() < 3) throw PreconditionError("estimate_lipschitz: need at least 3 samples");
  LipschitzReport r;
  r.analytic = analytic;
  const std::size_t K = profile.size() - 1;
  std::vector<LipschitzLevel> coarse_first;
  for (std::size_t stride = 1; K % stride == 0 && K / stride >= 2; stride *= 2)
    coarse_first.push_back({static_cast<int>(K / stride), detail::max_first_difference(profile, stride)});
  r.history.assign(coarse_first.rbegin(), coarse_first.rend());
  r.constant = r.history.back().constant;
  return r;
}

struct TimeIncrement {
  double dt = 0.0;
  State difference;  // |h(t1, t2') - h(t1, t2)|
};

/// Successive differences of h(t1, .) over a sorted list of end times.
template <FluxSampler S>
std::vector<TimeIncrement> time_modulus(const S& sampler, const std::vector<Face>& boundary, double t1,
                                        const std::vector<double>& t2_list, double tol) {
  if (!std::is_sorted(t2_list.begin(), t2_list.end()))
    throw PreconditionError("time_modulus: t2 list must be sorted");
  std::vector<FluxTrace> traces;
  for (double t2 : t2_list) traces.push_back(flux_trace(sampler, boundary, t1, t2, tol));
  std::vector<TimeIncrement> out;
  for (std::size_t k = 1; k < traces.size(); ++k) {
    State d = traces[k].value - traces[k - 1].value;
    for (double& v : d) v = std::abs(v);
    out.push_back({t2_list[k] - t2_list[k - 1], d});
  }
  return out;
}

/// f(u(x, t + eps)) . nu - f(u(x, t - eps)) . nu at a fixed point.
inline State integrand_jump(const PlanarWeakSolution& sol, const Point& x, const Point& nu, double t,
                            double eps = 1e-9) {
  const SystemModel& m = sol.model();
  return m.flux(sol.sample(x, t + eps)).contract(nu) - m.flux(sol.sample(x, std::max(0.0, t - eps))).contract(nu);
}

}  // namespace fluxbal

#endif  // FLUXBAL_TRACE_HPP_
