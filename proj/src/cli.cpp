// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <tuple>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "evopiezo/errors.hpp"
#include "evopiezo/evolution.hpp"
#include "evopiezo/quasistatic.hpp"
#include "evopiezo/report.hpp"
#include "evopiezo/snapshot.hpp"
#include "evopiezo/wellposedness.hpp"

namespace evopiezo {

namespace {

CheckOptions make_check_options(const CliOptions& o) {
  CheckOptions c;
  c.nu_cap = o.nu_cap;
  if (o.tol) c.tol = *o.tol;
  return c;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Certified:
      return kExitSuccess;
    case Verdict::Falsified:
      return kExitFalsified;
    default:
      return kExitInconclusive;
  }
}

// file outputs resolve against --out-dir when given, the cwd otherwise
std::string resolve_out(const CliOptions& opt, const std::string& name) {
  if (!opt.out_dir) return name;
  std::filesystem::create_directories(*opt.out_dir);
  return (std::filesystem::path(*opt.out_dir) / name).string();
}

void emit_report(const WellposednessReport& rep, const CliOptions& opt, std::ostream& out) {
  write_report(out, rep);
  if (opt.out_dir) {
    std::ofstream f(resolve_out(opt, "report.txt"));
    if (!f) throw FormatError("cli: cannot write report under " + *opt.out_dir);
    write_report(f, rep);
  }
}

// a constructor threw before the structured checker could run; the throw
// site is itself the violated hypothesis
WellposednessReport falsified_from(const std::exception& ex, const std::string& condition,
                                   long long cell) {
  WellposednessReport rep;
  rep.verdict = Verdict::Falsified;
  rep.conditions.push_back({condition, false, 0.0, cell});
  rep.detail = ex.what();
  return rep;
}

// the dense-path oracle diagonalizes the full assembled matrix; past this
// size the doubling search alone decides
constexpr std::int64_t kOracleDimCap = 1600;

using ProfiledSource = std::pair<std::vector<double>, SourceSpec>;

std::vector<double> combine_profiles(const std::vector<ProfiledSource>& ps, double t,
                                     std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (const auto& [vals, s] : ps) {
    double tf = source_time_factor(s, t);
    if (tf == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += tf * vals[i];
  }
  return out;
}

}  // namespace

int cmd_check(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
              std::ostream& err) {
  (void)err;
  const CheckOptions copt = make_check_options(opt);
  WellposednessReport rep;
  if (spec.mode == SimulationSpec::Mode::Full) {
    const MaterialConfig& m = spec.material;
    const std::int64_t dim = m.grid.num_cells() * m.dims.total();
    if (m.any_dense() && dim > kOracleDimCap) {
      rep = check_material(m, copt);
      if (!rep.detail.empty()) rep.detail += "; ";
      rep.detail += "direct eigenvalue crosscheck skipped at this size";
    } else {
      CrosscheckResult cc = verdict_crosscheck(m, copt);
      rep = cc.structured;
      if (!cc.verdicts_agree) {
        if (rep.verdict == Verdict::Certified) rep.verdict = Verdict::Inconclusive;
        rep.detail += "; direct eigenvalue check disagrees (";
        rep.detail += verdict_name(cc.oracle.verdict);
        rep.detail += "), certificate withdrawn";
      }
    }
  } else {
    try {
      CoefficientBlock M = build_M(spec.material);
      Projector P = build_projector(spec.material.grid, M);
      rep = check_reduced(spec.material, P, copt);
    } catch (const NotPositiveDefinite& ex) {
      rep = falsified_from(ex, "M_positive", ex.cell);
    } catch (const SingularCoefficient& ex) {
      rep = falsified_from(ex, "C_positive", ex.cell);
    }
  }
  emit_report(rep, opt, out);
  return verdict_exit(rep.verdict);
}

int cmd_simulate(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
                 std::ostream& err) {
  if (!spec.has_schedule) {
    err << "simulate: the config has no schedule section\n";
    return kExitInput;
  }
  if (spec.mode == SimulationSpec::Mode::Quasistatic) return cmd_reduce(spec, opt, out, err);

  const MaterialConfig& m = spec.material;
  if (opt.skip_check) {
    out << "solvability check skipped; outputs are watermarked UNCERTIFIED\n";
  } else {
    int gate = cmd_check(spec, opt, out, err);
    if (gate != kExitSuccess) return gate;
  }

  DiscreteSystem sys = build_discrete_system(m);
  SourceFn src = make_source(spec);

  SnapshotFn snap;
  if (spec.snapshot_stride > 0 && !spec.snapshot_fields.empty()) {
    const Grid grid = m.grid;
    const ComponentDims dims = m.dims;
    const std::vector<std::string> fields = spec.snapshot_fields;
    const CliOptions o = opt;
    snap = [grid, dims, fields, o](std::int64_t step, double, const std::vector<double>& u) {
      StateVector sv(grid, dims);
      sv.data = u;
      for (const auto& name : fields) {
        for (int comp = 0; comp < 6; ++comp) {
          if (name != component_name(comp)) continue;
          write_snapshot(sv.extract(comp),
                         resolve_out(o, name + "_" + std::to_string(step) + ".snap"), name);
          break;
        }
      }
    };
  }

  EnergyLog log;
  std::vector<double> u0(std::size_t(sys.n), 0.0);
  simulate(sys, std::move(u0), src, spec.schedule, log, spec.solver_tol, spec.method, snap,
           spec.snapshot_stride);
  const std::string log_path = resolve_out(opt, spec.energy_log);
  write_energy_csv(log_path, log, opt.skip_check);
  out << "energy log: " << log_path << " (" << log.rows.size() << " rows)\n";
  if (log.aborted) {
    err << "simulate: aborted: " << log.abort_reason << "\n";
    return kExitSolver;
  }
  return kExitSuccess;
}

int cmd_reduce(const SimulationSpec& spec, const CliOptions& opt, std::ostream& out,
               std::ostream& err) {
  if (spec.mode != SimulationSpec::Mode::Quasistatic) {
    err << "reduce: the config must set mode = quasistatic\n";
    return kExitInput;
  }
  const MaterialConfig& m = spec.material;
  const CheckOptions copt = make_check_options(opt);

  std::optional<CoefficientBlock> M;
  std::optional<Projector> P;
  try {
    M = build_M(m);
    P = build_projector(m.grid, *M);
  } catch (const NotPositiveDefinite& ex) {
    emit_report(falsified_from(ex, "M_positive", ex.cell), opt, out);
    return kExitFalsified;
  } catch (const SingularCoefficient& ex) {
    emit_report(falsified_from(ex, "C_positive", ex.cell), opt, out);
    return kExitFalsified;
  }

  if (opt.skip_check) {
    out << "solvability check skipped; outputs are watermarked UNCERTIFIED\n";
  } else {
    WellposednessReport rep = check_reduced(m, *P, copt);
    emit_report(rep, opt, out);
    if (rep.verdict != Verdict::Certified) return verdict_exit(rep.verdict);
  }

  std::optional<ReducedSystem> red;
  try {
    red = assemble_reduced(m, *P);
  } catch (const NotPositiveDefinite& ex) {
    emit_report(falsified_from(ex, "contraction", ex.cell), opt, out);
    return kExitFalsified;
  } catch (const SingularCoefficient& ex) {
    emit_report(falsified_from(ex, "C_positive", ex.cell), opt, out);
    return kExitFalsified;
  }
  out << "reduced system: " << red->total_dim() << " unknowns\n";

  if (!spec.has_schedule) return kExitSuccess;

  DiscreteSystem sys = red->to_discrete();

  const Grid grid = m.grid;
  const ReducedDims rd;
  const std::int64_t nc = grid.num_cells();
  const std::int64_t n = nc * rd.total();

  struct Part {
    std::int64_t base;
    std::vector<double> values;
    SourceSpec s;
  };
  auto parts = std::make_shared<std::vector<Part>>();
  auto psi_profiles = std::make_shared<std::vector<ProfiledSource>>();
  auto psi_dot_profiles = std::make_shared<std::vector<ProfiledSource>>();
  for (const SourceSpec& s : spec.sources) {
    if (s.channel == "psi" || s.channel == "psi_dot") {
      Field f = source_spatial_field(s, grid, 1);
      auto& dst = s.channel == "psi" ? *psi_profiles : *psi_dot_profiles;
      dst.push_back({std::move(f.values), s});
      continue;
    }
    int comp = s.channel == "v" ? 0 : s.channel == "T" ? 1 : s.channel == "theta_rel" ? 2 : 3;
    Field f = source_spatial_field(s, grid, rd.d[std::size_t(comp)]);
    parts->push_back({nc * rd.offset(comp), std::move(f.values), s});
  }

  // the charge-rate term rides on the reduced right-hand side through the
  // same projector solve the assembly used
  auto ctx = std::make_shared<const std::tuple<MaterialConfig, CoefficientBlock, Projector>>(
      m, *M, *P);

  SourceFn src = [parts, psi_dot_profiles, ctx, grid, n](double t, std::vector<double>& f) {
    f.assign(std::size_t(n), 0.0);
    for (const auto& p : *parts) {
      double tf = source_time_factor(p.s, t);
      if (tf == 0.0) continue;
      for (std::size_t i = 0; i < p.values.size(); ++i)
        f[std::size_t(p.base) + i] += tf * p.values[i];
    }
    if (!psi_dot_profiles->empty()) {
      Field pd(grid, 1);
      pd.values = combine_profiles(*psi_dot_profiles, t, pd.values.size());
      const auto& [mm, MM, PP] = *ctx;
      Field z0(grid, 3), z1(grid, 6), z4(grid, 1), z5(grid, 3);
      std::vector<double> corr = adjust_rhs(z0, z1, z4, z5, pd, mm, MM, PP);
      for (std::size_t i = 0; i < corr.size(); ++i) f[i] += corr[i];
    }
  };

  SnapshotFn snap;
  if (spec.snapshot_stride > 0 && !spec.snapshot_fields.empty()) {
    const std::vector<std::string> fields = spec.snapshot_fields;
    const CliOptions o = opt;
    snap = [fields, psi_profiles, ctx, grid, rd, nc, o](std::int64_t step, double t,
                                                        const std::vector<double>& u) {
      auto slice = [&](int comp) {
        Field f(grid, rd.d[std::size_t(comp)]);
        const auto base = std::size_t(nc * rd.offset(comp));
        std::copy(u.begin() + std::ptrdiff_t(base),
                  u.begin() + std::ptrdiff_t(base + f.values.size()), f.values.begin());
        return f;
      };
      std::optional<Reconstruction> rec;
      for (const auto& name : fields) {
        Field f;
        if (name == "v")
          f = slice(0);
        else if (name == "T")
          f = slice(1);
        else if (name == "theta_rel")
          f = slice(2);
        else if (name == "q")
          f = slice(3);
        else {
          if (!rec) {
            const auto& [mm, MM, PP] = *ctx;
            Field Phi = compute_Phi(mm, slice(1), slice(2));
            Field psi(grid, 1);
            psi.values = combine_profiles(*psi_profiles, t, psi.values.size());
            rec = reconstruct_E(grid, MM, PP, Phi, psi);
          }
          f = name == "E" ? rec->E : rec->phi;
        }
        write_snapshot(f, resolve_out(o, name + "_" + std::to_string(step) + ".snap"), name);
      }
    };
  }

  EnergyLog log;
  std::vector<double> u0(std::size_t(n), 0.0);
  simulate(sys, std::move(u0), src, spec.schedule, log, spec.solver_tol, spec.method, snap,
           spec.snapshot_stride);
  const std::string log_path = resolve_out(opt, spec.energy_log);
  write_energy_csv(log_path, log, opt.skip_check);
  out << "energy log: " << log_path << " (" << log.rows.size() << " rows)\n";
  if (log.aborted) {
    err << "reduce: aborted: " << log.abort_reason << "\n";
    return kExitSolver;
  }
  return kExitSuccess;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"coupled piezo-electro-magneto-thermal evolution toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run description file")->required();
    sub->add_option("--nu-cap", opt.nu_cap, "upper end of the certification search");
    sub->add_option("--tol", opt.tol, "certification threshold override");
    sub->add_flag("--skip-check", opt.skip_check,
                  "run without the solvability gate (outputs marked UNCERTIFIED)");
    sub->add_option("--out-dir", opt.out_dir, "directory for report, logs, and snapshots");
  };
  CLI::App* c_check = app.add_subcommand("check", "verify the solvability hypotheses");
  CLI::App* c_sim = app.add_subcommand("simulate", "time-step the full model");
  CLI::App* c_red =
      app.add_subcommand("reduce", "assemble and check the electrostatic reduction");
  add_common(c_check);
  add_common(c_sim);
  add_common(c_red);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitInput;
  }

  try {
    SimulationSpec spec = load_config(config_path);
    if (c_check->parsed()) return cmd_check(spec, opt, out, err);
    if (c_sim->parsed()) return cmd_simulate(spec, opt, out, err);
    return cmd_reduce(spec, opt, out, err);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what();
    if (ex.line > 0) err << " (line " << ex.line << ", column " << ex.column << ")";
    err << "\n";
    return kExitInput;
  } catch (const SolverFailure& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitInput;
  }
}

}  // namespace evopiezo
