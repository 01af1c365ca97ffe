#ifndef FLUXBAL_VERIFY_HPP_
#define FLUXBAL_VERIFY_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/exact.hpp"
#include "fluxbal/solver.hpp"
#include "fluxbal/trace.hpp"

namespace fluxbal {

/// One tolerance comparison. `measured` is compared against `tolerance`
/// with the sense given by `at_least`.
struct CaseResult {
  std::string label;
  std::string provenance;  // "oracle" or "solver"
  double measured = 0.0;
  double tolerance = 0.0;
  bool at_least = false;
  bool pass = false;
  std::vector<double> components;
  std::string note;
};

struct VerificationReport {
  std::string claim;  // balance | lipschitz-trace | corollary-box | time-continuity | weak-form | discrete-balance | convergence
  std::string inputs_digest;
  std::vector<CaseResult> cases;
  std::vector<std::map<std::string, double>> table;
  std::optional<std::uint64_t> seed;
  double runtime_seconds = 0.0;
  std::string note;

  bool pass() const {
    for (const CaseResult& c : cases)
      if (!c.pass) return false;
    return !cases.empty();
  }
};

inline std::string provenance_name(Provenance p) { return p == Provenance::ledger ? "solver" : "oracle"; }

namespace detail {

inline CaseResult upper_bound(std::string label, std::string prov, double measured, double tol,
                              std::vector<double> comps = {}, std::string note = {}) {
  return {std::move(label), std::move(prov), measured, tol, false, measured <= tol, std::move(comps), std::move(note)};
}

inline CaseResult lower_bound(std::string label, std::string prov, double measured, double tol,
                              std::vector<double> comps = {}, std::string note = {}) {
  return {std::move(label), std::move(prov), measured, tol, true, measured >= tol, std::move(comps), std::move(note)};
}

// Failures inside a check become a failing case rather than an exception.
inline CaseResult failure(std::string label, std::string prov, double tol, const std::exception& e) {
  return {std::move(label), std::move(prov), std::nan(""), tol, false, false, {}, e.what()};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::vector<double> to_vector(const State& s) { return {s.begin(), s.end()}; }

}  // namespace detail

/// |m(t2) - m(t1) + h(t1, t2)| per component for an oracle on a box or disk.
inline VerificationReport check_balance_exact(const PlanarWeakSolution& sol, const Domain& domain, double t1,
                                              double t2, double tol) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = "balance";
  const double qtol = 0.05 * tol;
  try {
    const State m1 = mass(sol, domain, t1, qtol);
    const State m2 = mass(sol, domain, t2, qtol);
    const FluxTrace h = flux_trace(OracleSampler{sol}, boundary_faces(domain), t1, t2, qtol);
    State res = m2 - m1 + h.value;
    for (double& v : res) v = std::abs(v);
    r.cases.push_back(detail::upper_bound("residual", "oracle", max_abs(res), tol, detail::to_vector(res)));
    r.table.push_back({{"t1", t1}, {"t2", t2}, {"mass_change", (m2 - m1)[0]}, {"outward_flux", h.value[0]},
                       {"residual", max_abs(res)}});
  } catch (const Error& e) {
    r.cases.push_back(detail::failure("residual", "oracle", tol, e));
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

/// Relative discrete balance residual over random cell unions and checkpoint pairs.
inline VerificationReport check_discrete_balance(const Trajectory& traj, int unions, int max_union_size,
                                                 std::uint64_t seed, double tol) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = "discrete-balance";
  r.seed = seed;
  std::mt19937_64 rng(seed);
  const int cells = traj.mesh.cell_count();
  const int snaps = static_cast<int>(traj.snapshots.size());
  std::uniform_int_distribution<int> pick_cell(0, cells - 1);
  std::uniform_int_distribution<int> pick_size(1, std::max(1, std::min(max_union_size, cells)));
  std::uniform_int_distribution<int> pick_snap(0, snaps - 1);
  double worst = 0.0;
  try {
    if (snaps < 2) throw PreconditionError("discrete balance needs at least two checkpoints");
    for (int k = 0; k < unions; ++k) {
      std::vector<int> u(pick_size(rng));
      for (int& c : u) c = pick_cell(rng);
      int a = pick_snap(rng), b = pick_snap(rng);
      while (b == a) b = pick_snap(rng);
      if (a > b) std::swap(a, b);
      const BalanceResidual res = discrete_balance_residual(traj, u, traj.snapshots[a].time, traj.snapshots[b].time);
      const double rel = max_abs(res.relative);
      worst = std::max(worst, rel);
      r.table.push_back({{"trial", double(k)}, {"cells", double(u.size())}, {"t1", traj.snapshots[a].time},
                         {"t2", traj.snapshots[b].time}, {"relative_residual", rel}});
    }
    r.cases.push_back(detail::upper_bound("max relative residual", "solver", worst, tol));
  } catch (const Error& e) {
    r.cases.push_back(detail::failure("max relative residual", "solver", tol, e));
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

struct LipschitzCriteria {
  double growth = 0.05;      // allowed relative growth per doubling past `stable_from`
  int stable_from = 32;
  std::optional<double> exact;  // closed-form constant, if any
  double exact_tol = 1e-4;
};

/// L-hat over refinement levels; `profile_at(K)` builds a profile with K intervals.
/// The estimate is a surrogate for the constant, which is not given numerically.
inline VerificationReport check_trace_lipschitz(const std::function<TraceProfile(int)>& profile_at,
                                                const std::vector<int>& levels, const LipschitzCriteria& crit,
                                                const std::string& provenance, const std::string& claim) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = claim;
  r.note = "L-hat stabilisation under refinement is a surrogate for the Lipschitz constant";
  std::vector<double> L;
  try {
    for (int K : levels) {
      const TraceProfile p = profile_at(K);
      const State c = estimate_lipschitz(p).constant;
      L.push_back(max_abs(c));
      r.table.push_back({{"K", double(K)}, {"L_hat", L.back()}});
    }
    double worst_growth = 0.0;
    for (std::size_t k = 1; k < levels.size(); ++k)
      if (levels[k - 1] >= crit.stable_from && L[k - 1] > 0.0)
        worst_growth = std::max(worst_growth, L[k] / L[k - 1] - 1.0);
    r.cases.push_back(detail::upper_bound("growth per doubling", provenance, worst_growth, crit.growth));
    if (crit.exact)
      r.cases.push_back(detail::upper_bound("|L_hat - L_exact|", provenance, std::abs(L.back() - *crit.exact),
                                            crit.exact_tol, {L.back(), *crit.exact}));
  } catch (const Error& e) {
    r.cases.push_back(detail::failure("L_hat", provenance, crit.growth, e));
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

/// Probe of the instantaneous integrand: the flux density may jump even
/// though h is continuous in time.
struct JumpProbe {
  Point x;
  Point normal;
  double t = 0.0;
  double min_jump = 0.4;
};

/// max over the grid of |h(t1, t2') - h(t1, t2)| / |t2' - t2| against
/// bound = sup|f . nu| |boundary|.
template <FluxSampler S>
VerificationReport check_time_continuity(const S& sampler, const std::vector<Face>& boundary, double t1,
                                         const std::vector<double>& t2_grid, const State& flux_sup, double tol,
                                         double slack, const PlanarWeakSolution* oracle = nullptr,
                                         std::optional<JumpProbe> probe = {}) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = "time-continuity";
  const std::string prov = provenance_name(sampler.provenance());
  const State bound = flux_sup * boundary_measure(boundary);
  try {
    State worst(sampler.components(), 0.0);
    for (const TimeIncrement& inc : time_modulus(sampler, boundary, t1, t2_grid, tol)) {
      for (std::size_t i = 0; i < worst.size(); ++i) worst[i] = std::max(worst[i], inc.difference[i] / inc.dt);
      r.table.push_back({{"dt", inc.dt}, {"ratio", max_abs(inc.difference) / inc.dt}});
    }
    // Per component ratio / bound; pass iff <= 1 + slack.
    double q = 0.0;
    for (std::size_t i = 0; i < worst.size(); ++i)
      q = std::max(q, bound[i] > 0.0 ? worst[i] / bound[i] : (worst[i] > 0.0 ? INFINITY : 0.0));
    std::vector<double> comps = detail::to_vector(worst);
    comps.insert(comps.end(), bound.begin(), bound.end());
    r.cases.push_back(detail::upper_bound("max ratio / bound", prov, q, 1.0 + slack, comps,
                                          "components: ratios then bounds"));
    if (probe) {
      if (!oracle) throw PreconditionError("jump probe needs an oracle");
      const State j = integrand_jump(*oracle, probe->x, probe->normal, probe->t);
      r.cases.push_back(detail::lower_bound("integrand jump", "oracle", max_abs(j), probe->min_jump,
                                            detail::to_vector(j)));
    }
  } catch (const Error& e) {
    r.cases.push_back(detail::failure("max ratio / bound", prov, 1.0 + slack, e));
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

/// Weak-form residual for `trials` seeded random bump test functions in Q.
inline VerificationReport check_weak_form(const PlanarWeakSolution& sol, const Cylinder& q, int trials,
                                          std::uint64_t seed, double tol) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = "weak-form";
  r.seed = seed;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    const std::string label = "trial " + std::to_string(k);
    try {
      const auto phi = BumpTestFunction::random(rng, q.box, q.t1, q.t2, sol.components());
      const double res = weak_form_residual(sol, phi, q, std::min(1e-11, 1e-3 * tol));
      r.cases.push_back(detail::upper_bound(label, "oracle", res, tol));
    } catch (const Error& e) {
      r.cases.push_back(detail::failure(label, "oracle", tol, e));
    }
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

/// Reference for a refinement study: exact cell averages and face fluxes.
struct ConvergenceReference {
  std::function<State(const Box& cell, double t)> cell_average;
  std::function<State(const AxisFace& face, double t1, double t2)> face_flux;
};

inline ConvergenceReference reference_for(const PlanarWeakSolution& sol, double tol) {
  return {[&sol, tol](const Box& cell, double t) { return mass(sol, cell, t, tol) * (1.0 / cell.volume()); },
          [&sol, tol](const AxisFace& f, double t1, double t2) { return exact_face_flux(sol, f, t1, t2, tol).value; }};
}

inline ConvergenceReference reference_for(const SineAdvectionSolution& sol) {
  return {[&sol](const Box& cell, double t) { return sol.mass(cell, t) * (1.0 / cell.volume()); },
          [&sol](const AxisFace& f, double t1, double t2) { return sol.face_flux(f, t1, t2).value; }};
}

struct ConvergenceCriteria {
  int monotone_from = 64;             // flux error strictly decreasing from this N on
  std::optional<double> min_field_order;  // finest-pair L1 order
  std::optional<double> min_flux_order;
};

/// Ledger flux errors (max over faces normal to axis 0 at `positions`, spanning the
/// mesh) and L1 field errors at t_end, one row per mesh size.
inline VerificationReport convergence_study(const SolverConfig& base, const std::vector<int>& cells,
                                            const std::vector<double>& positions, const ConvergenceReference& ref,
                                            const ConvergenceCriteria& crit) {
  const detail::Stopwatch clock;
  VerificationReport r;
  r.claim = "convergence";
  r.note = "observed orders use log2 of successive error ratios; criteria use the finest pair";
  std::vector<double> flux_err, field_err;
  try {
    for (int n : cells) {
      SolverConfig c = base;
      std::vector<int> counts(base.mesh.dim(), n);
      c.mesh = Mesh(base.mesh.extent(), counts);
      const Trajectory t = run(c);
      const LedgerSampler ledger{t};
      const double T = c.t_end;
      double fe = 0.0;
      for (double x : positions) {
        const Interval cross = c.mesh.dim() == 2 ? c.mesh.extent().side(1) : Interval{};
        const AxisFace face{c.mesh.dim(), 0, x, +1, cross};
        const State d = ledger.face_flux(face, 0.0, T, 0.0).value - ref.face_flux(face, 0.0, T);
        fe = std::max(fe, max_abs(d));
      }
      double l1 = 0.0;
      const Snapshot& last = t.snapshots.back();
      for (int k = 0; k < c.mesh.cell_count(); ++k)
        l1 += max_abs(last.field.cells[k] - ref.cell_average(c.mesh.cell_box(k), T)) * c.mesh.cell_volume();
      flux_err.push_back(fe);
      field_err.push_back(l1);
      std::map<std::string, double> row{{"N", double(n)}, {"flux_error", fe}, {"field_l1_error", l1}};
      if (flux_err.size() > 1) {
        const double ratio = std::log2(double(n) / cells[flux_err.size() - 2]);
        row["flux_order"] = std::log2(flux_err[flux_err.size() - 2] / fe) / ratio;
        row["field_order"] = std::log2(field_err[field_err.size() - 2] / l1) / ratio;
      }
      r.table.push_back(row);
    }
    int violations = 0;
    for (std::size_t k = 1; k < cells.size(); ++k)
      if (cells[k - 1] >= crit.monotone_from && !(flux_err[k] < flux_err[k - 1])) ++violations;
    r.cases.push_back(detail::upper_bound("flux error increases past N=" + std::to_string(crit.monotone_from),
                                          "solver", violations, 0.0, flux_err));
    if (cells.size() >= 2) {
      if (crit.min_field_order)
        r.cases.push_back(detail::lower_bound("field L1 order", "solver", r.table.back().at("field_order"),
                                              *crit.min_field_order, field_err));
      if (crit.min_flux_order)
        r.cases.push_back(detail::lower_bound("flux order", "solver", r.table.back().at("flux_order"),
                                              *crit.min_flux_order, flux_err));
    }
  } catch (const Error& e) {
    r.cases.push_back(detail::failure("convergence", "solver", 0.0, e));
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

}  // namespace fluxbal

#endif  // FLUXBAL_VERIFY_HPP_
