#ifndef FLUXBAL_CLI_HPP_
#define FLUXBAL_CLI_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fluxbal/config.hpp"
#include "fluxbal/verify.hpp"

#ifndef FLUXBAL_VERSION
#define FLUXBAL_VERSION "0.0.0"
#endif

namespace fluxbal {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitConfig = 2, kExitIo = 3, kExitNumeric = 4 };

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Tool version, config digest and seed; the first line of every output.
struct OutputHeader {
  std::string digest;
  std::uint64_t seed = 0;
  std::string line() const {
    return "# fluxbal " FLUXBAL_VERSION " config_digest=" + digest + " seed=" + std::to_string(seed);
  }
  Json json() const {
    return {{"tool", "fluxbal"}, {"version", FLUXBAL_VERSION}, {"config_digest", digest}, {"seed", seed}};
  }
};

/// Writes into a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

class CsvWriter {
 public:
  CsvWriter(const OutputHeader& header, const std::vector<std::string>& columns) {
    os_ << header.line() << '\n';
    row_text(columns);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    row_text(cells);
  }
  void row_text(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os_ << (k ? "," : "") << cells[k];
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

namespace detail {

inline std::vector<std::string> numbered(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int k = 1; k <= count; ++k) out.push_back(stem + "_" + std::to_string(k));
  return out;
}

inline std::vector<double> linspace(double lo, double hi, int intervals) {
  std::vector<double> out;
  for (int k = 0; k <= intervals; ++k) out.push_back(lo + (hi - lo) * k / intervals);
  return out;
}

inline PlanarWeakSolution make_oracle(const RunConfig& c, const std::string& needed_by) {
  if (!c.oracle) throw ConfigError("oracle", "missing required key (needed by " + needed_by + ")");
  return {c.model, c.oracle->normal, c.oracle->offset, c.oracle->left, c.oracle->right};
}

inline const Domain& require_domain(const RunConfig& c, const std::string& needed_by) {
  if (!c.domain) throw ConfigError("domain", "missing required key (needed by " + needed_by + ")");
  return *c.domain;
}

/// Solver run with every time in `times` among the snapshots.
inline Trajectory run_with_times(const RunConfig& c, std::vector<double> times) {
  const SolverConfig s = solver_config(c);
  times.insert(times.end(), c.checkpoints.begin(), c.checkpoints.end());
  std::erase_if(times, [](double t) { return t <= 0.0; });
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
              times.end());
  if (!times.empty() && times.back() > s.t_end * (1.0 + 1e-14))
    throw ConfigError("t_end", "must cover every requested time (need " + format_double(times.back()) + ")");
  for (double& t : times) t = std::min(t, s.t_end);
  return run(s, times);
}

/// Box whose faces are sampled by face profiles.
inline Box profile_box(const RunConfig& c, const ProfileSpec& p) {
  if (p.source == SourceKind::solver) return solver_config(c).mesh.extent();
  const Domain& d = require_domain(c, "a face profile");
  if (const auto* b = std::get_if<Box>(&d)) return *b;
  throw ConfigError("domain.kind", "face profiles need a box domain");
}

template <FluxSampler S>
TraceProfile build_profile(const RunConfig& c, const S& sampler, const ProfileSpec& p, int K, double tol) {
  if (p.profile == ProfileKind::face)
    return face_flux_profile(sampler, profile_box(c, p), p.axis, linspace(p.lo, p.hi, K), p.t1, p.t2, tol);
  const Domain base = p.source == SourceKind::solver && !c.domain ? Domain{solver_config(c).mesh.extent()}
                                                                  : require_domain(c, "a foliation profile");
  return trace_profile(sampler, BoundaryFoliation(base, c.foliation_delta, c.foliation_width), p.t1, p.t2, K, tol);
}

inline Json report_json(const VerificationReport& r) {
  Json cases = Json::array();
  for (const CaseResult& k : r.cases) {
    Json comps = Json::array();
    for (double v : k.components) comps.push_back(v);
    cases.push_back({{"label", k.label},
                     {"provenance", k.provenance},
                     {"measured", k.measured},
                     {"comparison", k.at_least ? ">=" : "<="},
                     {"tolerance", k.tolerance},
                     {"pass", k.pass},
                     {"components", comps},
                     {"note", k.note}});
  }
  Json table = Json::array();
  for (const auto& row : r.table) {
    Json j = Json::object();
    for (const auto& [key, v] : row) j[key] = v;
    table.push_back(j);
  }
  Json out{{"claim", r.claim}, {"inputs_digest", r.inputs_digest}, {"pass", r.pass()}};
  out["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
  out["note"] = r.note;
  out["cases"] = cases;
  out["table"] = table;
  out["runtime_seconds"] = r.runtime_seconds;
  return out;
}

inline void add_summary_rows(CsvWriter& csv, const VerificationReport& r) {
  for (const CaseResult& k : r.cases)
    csv.row_text({r.claim, "\"" + k.label + "\"", k.provenance, format_double(k.measured), k.at_least ? ">=" : "<=",
                  format_double(k.tolerance), k.pass ? "pass" : "fail"});
}

}  // namespace detail

/// Every check enabled in the config, in a fixed order.
inline std::vector<VerificationReport> run_checks(const RunConfig& c) {
  std::vector<VerificationReport> out;
  const VerifySpec& v = c.verify;
  const double tol = c.tol;
  const std::string digest = config_digest(c.resolved);

  if (v.balance.enabled) {
    const auto sol = detail::make_oracle(c, "verify.balance");
    out.push_back(check_balance_exact(sol, detail::require_domain(c, "verify.balance"), v.balance.t1, v.balance.t2,
                                      v.balance.tol));
  }
  if (v.lipschitz.enabled) {
    const LipschitzSpec& L = v.lipschitz;
    const LipschitzCriteria crit{L.growth, L.stable_from, L.exact, L.exact_tol};
    const std::string claim = L.where.profile == ProfileKind::face ? "corollary-box" : "lipschitz-trace";
    if (L.where.source == SourceKind::oracle) {
      const auto sol = detail::make_oracle(c, "verify.lipschitz");
      const OracleSampler s{sol};
      out.push_back(check_trace_lipschitz([&](int K) { return detail::build_profile(c, s, L.where, K, tol); },
                                          L.levels, crit, "oracle", claim));
    } else {
      const Trajectory t = detail::run_with_times(c, {L.where.t1, L.where.t2});
      const LedgerSampler s{t};
      out.push_back(check_trace_lipschitz([&](int K) { return detail::build_profile(c, s, L.where, K, tol); },
                                          L.levels, crit, "solver", claim));
    }
  }
  if (v.time_continuity.enabled) {
    const TimeContinuitySpec& T = v.time_continuity;
    const std::vector<double> grid = detail::linspace(T.t2_from, T.t2_to, T.count);
    const Domain& dom = detail::require_domain(c, "verify.time_continuity");
    const std::vector<Face> boundary = boundary_faces(dom);
    std::optional<PlanarWeakSolution> sol;
    if (c.oracle) sol = detail::make_oracle(c, "verify.time_continuity");
    std::optional<JumpProbe> probe;
    if (T.probe) {
      if (!sol) throw ConfigError("oracle", "missing required key (needed by verify.time_continuity.probe)");
      probe = JumpProbe{T.probe->x, sol->normal(), T.probe->t, T.probe->min_jump};
    }
    const PlanarWeakSolution* oracle = sol ? &*sol : nullptr;
    if (T.source == SourceKind::oracle) {
      if (!sol) throw ConfigError("oracle", "missing required key (needed by verify.time_continuity)");
      out.push_back(check_time_continuity(OracleSampler{*sol}, boundary, T.t1, grid, sol->flux_bound(), tol, T.slack,
                                          oracle, probe));
    } else {
      std::vector<double> times = grid;
      times.push_back(T.t1);
      const Trajectory t = detail::run_with_times(c, times);
      out.push_back(check_time_continuity(LedgerSampler{t}, boundary, T.t1, grid, flux_bound(t), tol, T.slack,
                                          oracle, probe));
    }
  }
  if (v.weak_form.enabled) {
    const auto sol = detail::make_oracle(c, "verify.weak_form");
    Box box;
    if (v.weak_form.box) {
      box = *v.weak_form.box;
    } else if (const auto* b = c.domain ? std::get_if<Box>(&*c.domain) : nullptr) {
      box = *b;
    } else {
      throw ConfigError("verify.weak_form.bounds", "missing required key (no box domain to default to)");
    }
    out.push_back(check_weak_form(sol, Cylinder{box, v.weak_form.t1, v.weak_form.t2}, v.weak_form.trials, c.seed,
                                  v.weak_form.tol));
  }
  if (v.discrete_balance.enabled) {
    const Trajectory t = detail::run_with_times(c, {});
    out.push_back(check_discrete_balance(t, v.discrete_balance.unions, v.discrete_balance.max_union_size, c.seed,
                                         v.discrete_balance.tol));
  }
  for (auto& r : out) r.inputs_digest = digest;
  return out;
}

/// Refinement study described by the `convergence` section.
inline VerificationReport run_convergence(const RunConfig& c) {
  if (!c.convergence) throw ConfigError("convergence", "missing required key (needed by 'convergence')");
  const SolverConfig base = solver_config(c);
  const ConvergenceSpec& cs = *c.convergence;
  const ConvergenceCriteria crit{cs.monotone_from, cs.min_field_order, cs.min_flux_order};
  VerificationReport r;
  if (c.init->kind == "oracle") {
    const auto sol = detail::make_oracle(c, "convergence");
    r = convergence_study(base, cs.cells, cs.faces, reference_for(sol, std::min(c.tol, 1e-10)), crit);
  } else if (c.init->kind == "sine" && c.model.kind() == ModelKind::advection && c.bc == BoundaryKind::periodic) {
    const SineAdvectionSolution sol(c.model, c.init->mean, c.init->amplitude, c.init->wavenumber);
    r = convergence_study(base, cs.cells, cs.faces, reference_for(sol), crit);
  } else {
    throw ConfigError("init.kind", "convergence needs an oracle or periodic sine advection reference");
  }
  r.inputs_digest = config_digest(c.resolved);
  return r;
}

/// Runs a subcommand and writes its artifacts under `out`. Returns the exit code.
inline int dispatch(const std::string& command, const RunConfig& c, const std::filesystem::path& out,
                    std::ostream& log = std::cout) {
  const OutputHeader header{config_digest(c.resolved), c.seed};
  const int D = c.model.components();
  const int n = c.dim;

  if (command == "solve") {
    const Trajectory t = detail::run_with_times(c, {});
    const Mesh& mesh = t.mesh;
    std::vector<std::string> cols{"x", "y"};
    cols.resize(n);
    for (const auto& s : detail::numbered("u", D)) cols.push_back(s);
    const auto field_csv = [&](const Snapshot& s) {
      CsvWriter csv(header, cols);
      for (int k = 0; k < mesh.cell_count(); ++k) {
        const Point x = mesh.cell_center(k);
        std::vector<double> row(x.begin(), x.end());
        row.insert(row.end(), s.field.cells[k].begin(), s.field.cells[k].end());
        csv.row(row);
      }
      return csv.str();
    };
    write_atomic(out / "field.csv", field_csv(t.snapshots.back()));
    for (std::size_t k = 1; k + 1 < t.snapshots.size(); ++k)
      write_atomic(out / ("field_" + std::to_string(k) + ".csv"), field_csv(t.snapshots[k]));
    std::vector<std::string> lcols{"axis", "face_index", "position", "t1", "t2"};
    for (const auto& s : detail::numbered("F", D)) lcols.push_back(s);
    CsvWriter ledger(header, lcols);
    for (std::size_t k = 1; k < t.snapshots.size(); ++k)
      for (int a = 0; a < mesh.dim(); ++a)
        for (int f = 0; f < mesh.face_count(a); ++f) {
          const State F = t.snapshots[k].ledger[a][f] - t.snapshots[k - 1].ledger[a][f];
          std::vector<double> row{double(a), double(f), mesh.face_position(a, f), t.snapshots[k - 1].time,
                                  t.snapshots[k].time};
          row.insert(row.end(), F.begin(), F.end());
          ledger.row(row);
        }
    write_atomic(out / "ledger.csv", ledger.str());
    log << "solve: " << t.steps.size() << " steps to t=" << format_double(t.snapshots.back().time) << ", wrote "
        << (out / "field.csv").string() << " and ledger.csv\n";
    return kExitOk;
  }

  if (command == "trace") {
    if (!c.trace) throw ConfigError("trace", "missing required key (needed by 'trace')");
    const TraceSpec& ts = *c.trace;
    TraceProfile p;
    if (ts.where.source == SourceKind::oracle) {
      const auto sol = detail::make_oracle(c, "'trace'");
      p = detail::build_profile(c, OracleSampler{sol}, ts.where, ts.K, c.tol);
    } else {
      const Trajectory t = detail::run_with_times(c, {ts.where.t1, ts.where.t2});
      p = detail::build_profile(c, LedgerSampler{t}, ts.where, ts.K, c.tol);
    }
    std::vector<std::string> cols{"y", "t1", "t2"};
    for (const auto& s : detail::numbered("h", D)) cols.push_back(s);
    cols.push_back("error_estimate");
    CsvWriter csv(header, cols);
    for (const FluxTrace& tr : p.traces) {
      std::vector<double> row{tr.y, tr.t1, tr.t2};
      row.insert(row.end(), tr.value.begin(), tr.value.end());
      row.push_back(tr.error_estimate);
      csv.row(row);
    }
    write_atomic(out / "trace.csv", csv.str());
    log << "trace: " << p.size() << " samples, wrote " << (out / "trace.csv").string() << "\n";
    return kExitOk;
  }

  const auto write_reports = [&](const std::vector<VerificationReport>& reports, const std::string& stem) {
    bool all = !reports.empty();
    Json arr = Json::array();
    CsvWriter summary(header, {"claim", "case", "provenance", "measured", "comparison", "tolerance", "result"});
    for (const auto& r : reports) {
      all = all && r.pass();
      arr.push_back(detail::report_json(r));
      detail::add_summary_rows(summary, r);
      log << (r.pass() ? "PASS " : "FAIL ") << r.claim << "\n";
    }
    Json doc;
    doc["header"] = header.json();
    doc["pass"] = all;
    doc["config"] = c.resolved;
    doc["reports"] = arr;
    write_atomic(out / (stem + ".json"), doc.dump(2) + "\n");
    write_atomic(out / (stem + "_summary.csv"), summary.str());
    return all ? kExitOk : kExitFailed;
  };

  if (command == "verify") {
    const auto reports = run_checks(c);
    if (reports.empty()) throw ConfigError("verify", "no checks are enabled");
    return write_reports(reports, "report");
  }

  if (command == "convergence") {
    const VerificationReport r = run_convergence(c);
    CsvWriter csv(header, {"N", "flux_error", "field_l1_error", "flux_order", "field_order"});
    for (const auto& row : r.table) {
      const auto get = [&](const char* k) { return row.count(k) ? row.at(k) : std::nan(""); };
      csv.row({get("N"), get("flux_error"), get("field_l1_error"), get("flux_order"), get("field_order")});
    }
    write_atomic(out / "convergence.csv", csv.str());
    return write_reports({r}, "convergence");
  }

  throw ConfigError("", "unknown subcommand '" + command + "'");
}

/// parse + dispatch with errors mapped to exit codes and reported on `err`.
inline int run_command(const std::string& command, const std::string& config_path,
                       const std::filesystem::path& out, std::optional<std::uint64_t> seed,
                       std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    RunConfig c = parse_config(config_path);
    if (seed) {
      c.seed = *seed;
      c.resolved["seed"] = *seed;
    }
    return dispatch(command, c, out, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace fluxbal

#endif  // FLUXBAL_CLI_HPP_
