#ifndef FLUXBAL_SOLVER_HPP_
#define FLUXBAL_SOLVER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "fluxbal/errors.hpp"
#include "fluxbal/exact.hpp"
#include "fluxbal/geometry.hpp"
#include "fluxbal/systems.hpp"
#include "fluxbal/trace.hpp"

namespace fluxbal {

/// Uniform Cartesian mesh. Cells are indexed i + N_0 * j; faces normal to
/// axis 0 are indexed i + (N_0 + 1) * j, faces normal to axis 1 i + N_0 * j.
class Mesh {
 public:
  Mesh() = default;
  Mesh(const Box& extent, const std::vector<int>& cells) : extent_(extent) {
    if (static_cast<int>(cells.size()) != extent.dim())
      throw PreconditionError("Mesh: need one cell count per axis");
    for (int j = 0; j < extent.dim(); ++j) {
      if (cells[j] < 1) throw PreconditionError("Mesh: cell counts must be >= 1");
      n_[j] = cells[j];
    }
  }

  const Box& extent() const noexcept { return extent_; }
  int dim() const noexcept { return extent_.dim(); }
  int cells(int axis) const noexcept { return axis < dim() ? n_[axis] : 1; }
  int cell_count() const noexcept { return cells(0) * cells(1); }
  double spacing(int axis) const noexcept { return extent_.side(axis).length() / n_[axis]; }
  double cell_volume() const noexcept {
    double v = 1.0;
    for (int j = 0; j < dim(); ++j) v *= spacing(j);
    return v;
  }
  int cell_index(int i, int j = 0) const noexcept { return i + cells(0) * j; }
  std::array<int, 2> cell_coords(int c) const noexcept { return {c % cells(0), c / cells(0)}; }

  Box cell_box(int c) const {
    const auto [i, j] = cell_coords(c);
    std::vector<Interval> s;
    const std::array<int, 2> ij{i, j};
    for (int a = 0; a < dim(); ++a) {
      const double lo = extent_.side(a).lo + ij[a] * spacing(a);
      s.push_back({lo, lo + spacing(a)});
    }
    return Box(s);
  }
  Point cell_center(int c) const { return cell_box(c).center(); }

  int face_count(int axis) const noexcept {
    return axis == 0 ? (cells(0) + 1) * cells(1) : cells(0) * (cells(1) + 1);
  }
  /// Face normal to `axis` with lattice coordinates (i, j).
  int face_index(int axis, int i, int j = 0) const noexcept {
    return axis == 0 ? i + (cells(0) + 1) * j : i + cells(0) * j;
  }
  std::array<int, 2> face_coords(int axis, int f) const noexcept {
    const int stride = axis == 0 ? cells(0) + 1 : cells(0);
    return {f % stride, f / stride};
  }
  /// Coordinate of the face along its normal axis.
  double face_position(int axis, int f) const noexcept {
    const auto ij = face_coords(axis, f);
    return extent_.side(axis).lo + ij[axis] * spacing(axis);
  }
  double face_area(int axis) const noexcept { return dim() == 1 ? 1.0 : spacing(1 - axis); }

 private:
  Box extent_{{0.0, 1.0}};
  std::array<int, 2> n_{1, 1};
};

struct CellField {
  std::vector<State> cells;
  double time = 0.0;
};

/// Accumulated sum over steps of (numerical flux) * (face area) * dt per face.
struct FluxLedger {
  std::array<std::vector<State>, kMaxDim> totals;
  double t_start = 0.0;
  double t_now = 0.0;
};

enum class BoundaryKind { outflow, periodic };

/// Planar Riemann data; cells start from exact averages of the oracle at `sample_time`.
struct RiemannInit {
  State left, right;
  Point normal;
  double offset = 0.0;
  double sample_time = 0.0;
};
struct ConstantInit {
  State state;
};
/// mean + amplitude sin(2 pi k . x), scalar models only.
struct SineInit {
  double mean = 0.0;
  double amplitude = 1.0;
  Point wavenumber;
};
using InitialData = std::variant<RiemannInit, ConstantInit, SineInit>;

struct SolverConfig {
  SystemModel model = SystemModel::burgers(1);
  Mesh mesh;
  double cfl = 0.45;
  double t_end = 1.0;
  BoundaryKind bc = BoundaryKind::outflow;
  InitialData init = ConstantInit{State{0.0}};

  void validate() const {
    if (!(cfl > 0.0 && cfl < 1.0)) throw PreconditionError("solver: cfl must lie in (0, 1)");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("solver: t_end must be >= 0");
    if (mesh.dim() != model.dim()) throw PreconditionError("solver: mesh and model dimensions differ");
    if (model.kind() == ModelKind::advection && max_abs(model.velocity()) == 0.0)
      throw PreconditionError("solver: advection velocity is zero, no time step can be chosen");
    if (const auto* r = std::get_if<RiemannInit>(&init)) {
      model.check_admissible(r->left);
      model.check_admissible(r->right);
    } else if (const auto* c = std::get_if<ConstantInit>(&init)) {
      model.check_admissible(c->state);
    } else {
      const auto& s = std::get<SineInit>(init);
      if (model.components() != 1) throw PreconditionError("solver: sine initial data needs a scalar model");
      if (static_cast<int>(s.wavenumber.size()) != model.dim())
        throw PreconditionError("solver: sine wavenumber dimension mismatch");
    }
  }
};

inline std::pair<CellField, FluxLedger> init(const SolverConfig& config) {
  config.validate();
  const Mesh& mesh = config.mesh;
  const int D = config.model.components();
  CellField field;
  field.cells.resize(mesh.cell_count());
  const double vol = mesh.cell_volume();
  std::visit(
      [&](const auto& data) {
        using T = std::decay_t<decltype(data)>;
        if constexpr (std::is_same_v<T, RiemannInit>) {
          const PlanarWeakSolution sol(config.model, data.normal, data.offset, data.left, data.right);
          for (int c = 0; c < mesh.cell_count(); ++c)
            field.cells[c] = mass(sol, mesh.cell_box(c), data.sample_time) * (1.0 / vol);
        } else if constexpr (std::is_same_v<T, ConstantInit>) {
          std::fill(field.cells.begin(), field.cells.end(), data.state);
        } else {
          const SineAdvectionSolution sine(SystemModel::advection(Point(mesh.dim(), 0.0)), data.mean,
                                           data.amplitude, data.wavenumber);
          for (int c = 0; c < mesh.cell_count(); ++c) field.cells[c] = sine.mass(mesh.cell_box(c), 0.0) * (1.0 / vol);
        }
      },
      config.init);
  for (const State& u : field.cells) config.model.check_admissible(u);
  FluxLedger ledger;
  for (int a = 0; a < mesh.dim(); ++a) ledger.totals[a].assign(mesh.face_count(a), State(D, 0.0));
  return {std::move(field), std::move(ledger)};
}

struct StepInfo {
  double dt = 0.0;
  double courant = 0.0;  // max over axes and cells of dt * max_speed / dx
};

inline Point axis_direction(int dim, int axis) {
  Point e(dim, 0.0);
  e[axis] = 1.0;
  return e;
}

/// Stable time step: cfl / max_j max_c (max_speed_j(u_c) / dx_j).
inline double stable_dt(const SolverConfig& config, const CellField& field) {
  const Mesh& mesh = config.mesh;
  double rate = 0.0;
  for (int a = 0; a < mesh.dim(); ++a) {
    const Point e = axis_direction(mesh.dim(), a);
    double speed = 0.0;
    for (const State& u : field.cells) speed = std::max(speed, config.model.max_speed(u, e));
    rate = std::max(rate, speed / mesh.spacing(a));
  }
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return config.cfl / rate;
}

/// One unsplit first-order Godunov step of length min(stable dt, dt_cap),
/// recording every face flux in the ledger.
inline StepInfo step(const SolverConfig& config, CellField& field, FluxLedger& ledger,
                     double dt_cap = std::numeric_limits<double>::infinity()) {
  const Mesh& mesh = config.mesh;
  const SystemModel& model = config.model;
  const double dt_stable = stable_dt(config, field);
  if (!std::isfinite(dt_stable))
    throw SolverError("step: max_speed vanishes on every cell, time step is degenerate", 0.0);
  const double dt = std::min(dt_stable, dt_cap);
  if (!(dt > 0.0)) throw SolverError("step: non-positive time step", dt);

  std::vector<State> next = field.cells;
  double courant = 0.0;
  for (int a = 0; a < mesh.dim(); ++a) {
    const Point e = axis_direction(mesh.dim(), a);
    const int na = mesh.cells(a);
    const int nb = mesh.dim() == 2 ? mesh.cells(1 - a) : 1;
    const double ratio = dt / mesh.spacing(a);
    const double area_dt = mesh.face_area(a) * dt;
    for (const State& u : field.cells) courant = std::max(courant, model.max_speed(u, e) * ratio);

    for (int b = 0; b < nb; ++b) {
      const auto cell = [&](int i) { return a == 0 ? mesh.cell_index(i, b) : mesh.cell_index(b, i); };
      const auto face = [&](int i) { return a == 0 ? mesh.face_index(0, i, b) : mesh.face_index(1, b, i); };
      std::vector<State> flux(na + 1);
      for (int i = 1; i < na; ++i) flux[i] = godunov_flux(model, field.cells[cell(i - 1)], field.cells[cell(i)], e);
      if (config.bc == BoundaryKind::periodic) {
        flux[0] = godunov_flux(model, field.cells[cell(na - 1)], field.cells[cell(0)], e);
        flux[na] = flux[0];
      } else {
        flux[0] = godunov_flux(model, field.cells[cell(0)], field.cells[cell(0)], e);
        flux[na] = godunov_flux(model, field.cells[cell(na - 1)], field.cells[cell(na - 1)], e);
      }
      for (int i = 0; i <= na; ++i) ledger.totals[a][face(i)] += flux[i] * area_dt;
      for (int i = 0; i < na; ++i) next[cell(i)] -= (flux[i + 1] - flux[i]) * ratio;
    }
  }
  for (const State& u : next) model.check_admissible(u);
  field.cells = std::move(next);
  field.time += dt;
  ledger.t_now = field.time;
  return {dt, courant};
}

struct Snapshot {
  double time = 0.0;
  CellField field;
  std::array<std::vector<State>, kMaxDim> ledger;
};

/// Snapshots at t = 0, each checkpoint, and t_end.
struct Trajectory {
  Mesh mesh;
  SystemModel model = SystemModel::burgers(1);
  std::vector<Snapshot> snapshots;
  std::vector<StepInfo> steps;

  std::size_t find(double t) const {
    for (std::size_t k = 0; k < snapshots.size(); ++k)
      if (std::abs(snapshots[k].time - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
    throw PreconditionError("unknown checkpoint t = " + std::to_string(t));
  }
  int components() const { return model.components(); }
};

inline Trajectory run(const SolverConfig& config, const std::vector<double>& checkpoints = {}) {
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (!(checkpoints[k] > 0.0) || checkpoints[k] > config.t_end)
      throw PreconditionError("run: checkpoints must lie in (0, t_end]");
    if (k > 0 && !(checkpoints[k] > checkpoints[k - 1]))
      throw PreconditionError("run: checkpoints must be strictly increasing");
  }
  auto [field, ledger] = init(config);
  Trajectory traj;
  traj.mesh = config.mesh;
  traj.model = config.model;
  traj.snapshots.push_back({0.0, field, ledger.totals});
  std::vector<double> targets = checkpoints;
  if (targets.empty() || targets.back() < config.t_end) targets.push_back(config.t_end);
  for (double target : targets) {
    while (field.time < target) {
      const double remaining = target - field.time;
      const StepInfo info = step(config, field, ledger, remaining);
      traj.steps.push_back(info);
      if (info.dt == remaining) field.time = target;  // land exactly
      ledger.t_now = field.time;
    }
    if (target > 0.0) traj.snapshots.push_back({target, field, ledger.totals});
  }
  return traj;
}

struct BalanceResidual {
  State absolute;  // (mass change) + (net outward ledger flux)
  State relative;  // absolute / sum of magnitudes of all terms
};

/// Discrete balance over a union of cells between two checkpoints.
inline BalanceResidual discrete_balance_residual(const Trajectory& traj, const std::vector<int>& cells,
                                                 double t1, double t2) {
  if (cells.empty()) throw PreconditionError("discrete_balance_residual: cell union is empty");
  const Snapshot& s1 = traj.snapshots[traj.find(t1)];
  const Snapshot& s2 = traj.snapshots[traj.find(t2)];
  const Mesh& mesh = traj.mesh;
  const int D = traj.components();
  std::vector<char> in(mesh.cell_count(), 0);
  for (int c : cells) {
    if (c < 0 || c >= mesh.cell_count()) throw PreconditionError("discrete_balance_residual: bad cell index");
    in[c] = 1;
  }
  State res(D, 0.0), scale(D, 0.0);
  const double vol = mesh.cell_volume();
  const auto add = [&](const State& term) {
    res += term;
    for (int i = 0; i < D; ++i) scale[i] += std::abs(term[i]);
  };
  for (int c = 0; c < mesh.cell_count(); ++c) {
    if (!in[c]) continue;
    add(s2.field.cells[c] * vol);
    add(s1.field.cells[c] * (-vol));
    const auto [i, j] = mesh.cell_coords(c);
    for (int a = 0; a < mesh.dim(); ++a) {
      const int lo = a == 0 ? mesh.face_index(0, i, j) : mesh.face_index(1, i, j);
      const int hi = a == 0 ? mesh.face_index(0, i + 1, j) : mesh.face_index(1, i, j + 1);
      add(s2.ledger[a][hi] - s1.ledger[a][hi]);
      add(s1.ledger[a][lo] - s2.ledger[a][lo]);
    }
  }
  State rel(D, 0.0);
  for (int i = 0; i < D; ++i) rel[i] = scale[i] > 0.0 ? std::abs(res[i]) / scale[i] : 0.0;
  return {res, rel};
}

/// Discrete sampler: face fluxes and masses read from a trajectory. Faces
/// must coincide with mesh faces and times with checkpoints.
class LedgerSampler {
 public:
  explicit LedgerSampler(const Trajectory& traj) : traj_(&traj) {}

  Estimate face_flux(const Face& face, double t1, double t2, double /*tol*/) const {
    const auto* af = std::get_if<AxisFace>(&face);
    if (!af) throw PreconditionError("ledger sampler: only mesh-aligned axis faces are supported");
    const Mesh& mesh = traj_->mesh;
    if (af->dim != mesh.dim()) throw PreconditionError("ledger sampler: dimension mismatch");
    const Snapshot& s1 = traj_->snapshots[traj_->find(t1)];
    const Snapshot& s2 = traj_->snapshots[traj_->find(t2)];
    const int a = af->axis;
    const int i = lattice(a, af->position, mesh.cells(a));
    int jlo = 0, jhi = 1;
    if (mesh.dim() == 2) {
      jlo = lattice(1 - a, af->cross.lo, mesh.cells(1 - a));
      jhi = lattice(1 - a, af->cross.hi, mesh.cells(1 - a));
    }
    State sum(traj_->components(), 0.0);
    for (int j = jlo; j < jhi; ++j) {
      const int f = a == 0 ? mesh.face_index(0, i, j) : mesh.face_index(1, j, i);
      sum += s2.ledger[a][f] - s1.ledger[a][f];
    }
    return {sum * static_cast<double>(af->orientation), 0.0};
  }

  Estimate mass(const Domain& domain, double t, double /*tol*/ = 0.0) const {
    const auto* box = std::get_if<Box>(&domain);
    if (!box) throw PreconditionError("ledger sampler: mass needs a mesh-aligned box");
    const Mesh& mesh = traj_->mesh;
    const Snapshot& s = traj_->snapshots[traj_->find(t)];
    std::array<int, 2> lo{0, 0}, hi{1, 1};
    for (int a = 0; a < mesh.dim(); ++a) {
      lo[a] = lattice(a, box->side(a).lo, mesh.cells(a));
      hi[a] = lattice(a, box->side(a).hi, mesh.cells(a));
    }
    State sum(traj_->components(), 0.0);
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) sum += s.field.cells[mesh.cell_index(i, j)];
    return {sum * mesh.cell_volume(), 0.0};
  }

  int components() const { return traj_->components(); }
  Provenance provenance() const { return Provenance::ledger; }
  const Trajectory& trajectory() const { return *traj_; }

 private:
  int lattice(int axis, double x, int n) const {
    const Mesh& mesh = traj_->mesh;
    const double h = mesh.spacing(axis);
    const double k = (x - mesh.extent().side(axis).lo) / h;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 || r < 0 || r > n)
      throw PreconditionError("ledger sampler: position " + std::to_string(x) + " is not a mesh face");
    return static_cast<int>(r);
  }

  const Trajectory* traj_;
};

/// Per component, sup over all snapshot cells of |f_i(u)|.
inline State flux_bound(const Trajectory& traj) {
  State b(traj.components(), 0.0);
  for (const Snapshot& s : traj.snapshots)
    for (const State& u : s.field.cells) {
      const FluxMatrix f = traj.model.flux(u);
      for (int i = 0; i < traj.components(); ++i) b[i] = std::max(b[i], norm2(f.rows[i]));
    }
  return b;
}

}  // namespace fluxbal

#endif  // FLUXBAL_SOLVER_HPP_
