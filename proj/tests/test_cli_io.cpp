// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "evopiezo/cli.hpp"
#include "evopiezo/config.hpp"
#include "evopiezo/errors.hpp"
#include "evopiezo/report.hpp"
#include "evopiezo/snapshot.hpp"

using namespace evopiezo;
namespace fs = std::filesystem;

namespace {

ConfigError capture_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError");
  return ConfigError("unreachable");
}

// scratch directory shared by the process-level tests; fresh per run
class TempDir {
 public:
  TempDir() {
    root_ = fs::temp_directory_path() /
            ("evopiezo-test-" + std::to_string(std::uintptr_t(this)));
    fs::create_directories(root_);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(root_, ec); }
  fs::path file(const std::string& name, const std::string& content) const {
    fs::path p = root_ / name;
    std::ofstream os(p);
    os << content;
    return p;
  }
  fs::path path(const std::string& name) const { return root_ / name; }

 private:
  fs::path root_;
};

int run(std::vector<std::string> args, std::string* out = nullptr,
        std::string* err = nullptr) {
  std::vector<const char*> argv = {"evopiezo"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int rc = run_cli(int(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return rc;
}

const char* kMinimalFull = R"(
grid { cells = 2 2 2 }
)";

const char* kSlowPencil = R"(
grid { cells = 1 1 1 }
material {
  kappa1 = constant 1e-12 0 0 0 1e-12 0 0 0 1e-12
  kappa0_inv = constant -1 0 0 0 -1 0 0 0 -1
}
)";

}  // namespace

TEST_CASE("defaults of a minimal config") {
  SimulationSpec spec = parse_config(kMinimalFull);
  CHECK(spec.mode == SimulationSpec::Mode::Full);
  CHECK_FALSE(spec.has_schedule);
  CHECK(spec.solver_tol == 1e-12);
  CHECK(spec.method == SolveMethod::Auto);
  CHECK(spec.energy_log == "energy.csv");
  CHECK(spec.snapshot_stride == 0);
  CHECK(spec.material.grid.num_cells() == 8);
  CHECK(spec.schedule.theta == 0.5);
}

TEST_CASE("diagnostics carry the offending position") {
  ConfigError e = capture_error("grid { cells = 2 2 2 }\nbogus = 1\n");
  CHECK(std::string(e.what()) == "config: unknown key 'bogus' in the top level");
  CHECK(e.line == 2);
  CHECK(e.column == 1);

  ConfigError dup = capture_error("grid { cells = 1 1 1 }\ngrid { cells = 2 2 2 }\n");
  CHECK(std::string(dup.what()).find("duplicate top-level key 'grid'") != std::string::npos);

  ConfigError brace = capture_error("grid { cells = 1 1 1\n");
  CHECK(std::string(brace.what()).find("never closed") != std::string::npos);

  ConfigError mode = capture_error("mode = sideways\ngrid { cells = 1 1 1 }\n");
  CHECK(std::string(mode.what()).find("mode must be") != std::string::npos);
}

TEST_CASE("quasistatic configs must switch conduction off") {
  ConfigError e = capture_error(
      "mode = quasistatic\ngrid { cells = 2 2 2 }\n"
      "material { sigma = identity 0.5 }\n");
  CHECK(std::string(e.what()).find("requires sigma = 0") != std::string::npos);
  CHECK_NOTHROW(parse_config("mode = quasistatic\ngrid { cells = 2 2 2 }\n"
                             "material { sigma = zero }\n"));
}

TEST_CASE("schedule bounds are parse-time errors") {
  ConfigError e = capture_error(
      "grid { cells = 1 1 1 }\nschedule { dt = 0.1\nsteps = 5\ntheta = 0.3 }\n");
  CHECK(std::string(e.what()).find("theta out of [0.5,1]") != std::string::npos);
  ConfigError missing =
      capture_error("grid { cells = 1 1 1 }\nschedule { dt = 0.1 }\n");
  CHECK(std::string(missing.what()).find("needs 'dt' and 'steps'") != std::string::npos);
}

TEST_CASE("only the built-in boundary triple parses") {
  CHECK_NOTHROW(parse_config(
      "grid { cells = 1 1 1 }\n"
      "boundary { velocity = clamped\nelectric = grounded\nthermal = insulated }\n"));
  ConfigError e = capture_error(
      "grid { cells = 1 1 1 }\nboundary { velocity = free }\n");
  CHECK(std::string(e.what()).find("built-in boundary triple") != std::string::npos);
}

TEST_CASE("source channels are validated against the mode") {
  ConfigError e = capture_error(
      "grid { cells = 1 1 1 }\nsource { channel = psi }\n");
  CHECK(std::string(e.what()).find("does not exist in this mode") != std::string::npos);
  CHECK_NOTHROW(parse_config(
      "mode = quasistatic\ngrid { cells = 1 1 1 }\nsource { channel = psi }\n"));

  ConfigError oob = capture_error(
      "grid { cells = 1 1 1 }\nsource { channel = T\ncomponent = 6 }\n");
  CHECK(std::string(oob.what()).find("out of range") != std::string::npos);

  SimulationSpec spec = parse_config(
      "grid { cells = 2 2 2 }\n"
      "source { channel = v\ncomponent = 1\n"
      "spatial = gaussian-bump center 0.5 0.5 0.5 width 0.2 amplitude 2\n"
      "time = sine 3 }\n");
  REQUIRE(spec.sources.size() == 1);
  CHECK(spec.sources[0].time == SourceSpec::Time::Sine);
  CHECK(spec.sources[0].freq == 3.0);
  CHECK(source_time_factor(spec.sources[0], 0.25 / 3.0) == doctest::Approx(1.0));
}

TEST_CASE("snapshot field names are mode-specific") {
  ConfigError e = capture_error(
      "grid { cells = 1 1 1 }\noutputs { snapshot_fields = phi }\n");
  CHECK(std::string(e.what()).find("phi") != std::string::npos);
  CHECK_NOTHROW(parse_config(
      "mode = quasistatic\ngrid { cells = 1 1 1 }\noutputs { snapshot_fields = phi E }\n"));
  CHECK_NOTHROW(parse_config(
      "grid { cells = 1 1 1 }\noutputs { snapshot_fields = E H v }\n"));
}

TEST_CASE("engineering inputs gain the shear weights") {
  SimulationSpec eng = parse_config(
      "grid { cells = 1 1 1 }\n"
      "material {\n"
      "  convention = engineering\n"
      "  C = constant 1 0 0 0 0 0  0 2 0 0 0 0  0 0 3 0 0 0"
      "  0 0 0 4 0 0  0 0 0 0 5 0  0 0 0 0 0 6\n"
      "  e = constant 0 0 0  0 0 0  0 0 0  1 0 0  0 0 0  0 0 0\n"
      "}\n");
  DenseMatrix C = eng.material.C.cell_matrix(0);
  CHECK(C(0, 0) == doctest::Approx(1.0));
  CHECK(C(3, 3) == doctest::Approx(8.0));   // sqrt2 * 4 * sqrt2
  CHECK(C(5, 5) == doctest::Approx(12.0));
  DenseMatrix E = eng.material.e.cell_matrix(0);
  CHECK(E(3, 0) == doctest::Approx(std::sqrt(2.0)));

  // weighted inputs pass through untouched
  SimulationSpec wtd = parse_config(
      "grid { cells = 1 1 1 }\n"
      "material { convention = weighted\n"
      "  C = constant 1 0 0 0 0 0  0 2 0 0 0 0  0 0 3 0 0 0"
      "  0 0 0 4 0 0  0 0 0 0 5 0  0 0 0 0 0 6\n}\n");
  CHECK(wtd.material.C.cell_matrix(0)(3, 3) == doctest::Approx(4.0));
}

TEST_CASE("block forms cover constant, split, and nonlocal kernels") {
  SimulationSpec spec = parse_config(
      "grid { cells = 2 2 2 }\n"
      "material {\n"
      "  theta0 = split 0 1 1 2\n"
      "  alpha = constant 2.5\n"
      "  epsilon = gaussian width 0.3 amplitude 0.4 shift 1\n"
      "}\n");
  CHECK(spec.material.theta0.at(0, 0) == 1.0);
  CHECK(spec.material.theta0.at(spec.material.grid.num_cells() - 1, 0) == 2.0);
  CHECK(spec.material.alpha.cell_data(0)[0] == 2.5);
  CHECK(spec.material.epsilon.is_dense());
  CHECK(spec.material.any_dense());
  // gamma0 picks up the split theta0
  CHECK(spec.material.gamma0.cell_data(0)[0] == doctest::Approx(2.5));
  CHECK(spec.material.gamma0.cell_data(spec.material.grid.num_cells() - 1)[0] ==
        doctest::Approx(5.0));

  ConfigError e = capture_error(
      "grid { cells = 1 1 1 }\nmaterial { e = identity }\n");
  CHECK(std::string(e.what()).find("rectangular") != std::string::npos);
}

TEST_CASE("snapshot stream format is stable and bit-exact") {
  Grid g = make_grid({2, 2, 2}, {1, 1, 1});
  Field f(g, 3);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = std::sin(double(i) + 0.5) * 1e3;
  f.values[5] = -0.0;

  std::ostringstream os(std::ios::binary);
  write_snapshot(f, os, "E");
  std::string blob = os.str();
  CHECK(blob.compare(0, 20, "EVOPIEZO1 E 2 2 2 3\n") == 0);
  CHECK(blob.size() == 20 + 8 * 24);

  std::istringstream is(blob, std::ios::binary);
  SnapshotData back = read_snapshot(is);
  CHECK(back.name == "E");
  CHECK(back.field.comps == 3);
  CHECK(back.field.grid.num_cells() == 8);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(back.field.values[i] == f.values[i]);
  }
  CHECK(std::signbit(back.field.values[5]));

  std::istringstream trunc(blob.substr(0, blob.size() - 3), std::ios::binary);
  CHECK_THROWS_AS(read_snapshot(trunc), FormatError);
  std::istringstream extra(blob + "x", std::ios::binary);
  CHECK_THROWS_AS(read_snapshot(extra), FormatError);
  std::string wrong = blob;
  wrong[8] = '2';
  std::istringstream badmagic(wrong, std::ios::binary);
  CHECK_THROWS_AS(read_snapshot(badmagic), FormatError);
  CHECK_THROWS_AS(write_snapshot(f, os, "two words"), InvalidArgument);
}

TEST_CASE("report text round-trips every number bit for bit") {
  WellposednessReport rep;
  rep.verdict = Verdict::Certified;
  rep.nu_star = 4.0;
  rep.c0 = 1.0 / 3.0;
  rep.oracle_min_eig = 0.12345678901234567;
  rep.conditions.push_back({"C_positive", true, 2.0 / 7.0, -1});
  rep.conditions.push_back({"E_pencil", false, -1.5e-11, 42});
  rep.detail = "joint pencil search over 31 samples";

  std::string text = report_to_string(rep);
  CHECK(text.rfind("evopiezo-report 1\n", 0) == 0);
  std::istringstream is(text);
  WellposednessReport back = parse_report(is);
  CHECK(back.verdict == Verdict::Certified);
  CHECK(back.nu_star == rep.nu_star);
  CHECK(back.c0 == rep.c0);
  REQUIRE(back.oracle_min_eig.has_value());
  CHECK(*back.oracle_min_eig == *rep.oracle_min_eig);
  REQUIRE(back.conditions.size() == 2);
  CHECK(back.conditions[0].name == "C_positive");
  CHECK(back.conditions[0].passed);
  CHECK(back.conditions[0].witness == rep.conditions[0].witness);
  CHECK(back.conditions[1].cell == 42);
  CHECK_FALSE(back.conditions[1].passed);
  CHECK(back.detail == rep.detail);

  std::istringstream junk("evopiezo-report 9\n");
  CHECK_THROWS_AS(parse_report(junk), FormatError);
}

TEST_CASE("energy csv layout: watermark, header, rows, abort trailer") {
  EnergyLog log;
  EnergyRow r;
  r.step = 1;
  r.time = 0.1;
  r.energy = 1.0 / 3.0;
  log.rows.push_back(r);
  log.aborted = true;
  log.abort_reason = "solver stalled at step 2";

  std::ostringstream os;
  write_energy_csv(os, log, true);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# UNCERTIFIED");
  std::getline(is, line);
  CHECK(line == "step,time,energy,dissipation,source_work,balance_residual,solve_residual");
  std::getline(is, line);
  CHECK(line.rfind("1,", 0) == 0);
  CHECK(line.find("0.33333333333333331") != std::string::npos);
  std::getline(is, line);
  CHECK(line == "# aborted: solver stalled at step 2");

  std::ostringstream clean;
  write_energy_csv(clean, EnergyLog{}, false);
  CHECK(clean.str().rfind("step,time", 0) == 0);
}

TEST_CASE("cli: check certifies the identity material") {
  TempDir tmp;
  fs::path cfg = tmp.file("id.cfg", kMinimalFull);
  std::string out, err;
  int rc = run({"check", cfg.string()}, &out, &err);
  CHECK(rc == kExitSuccess);
  CHECK(out.find("verdict certified") != std::string::npos);
  CHECK(out.find("nu_star 1") != std::string::npos);
  CHECK(out.find("c0 1") != std::string::npos);
  CHECK(err.empty());
}

TEST_CASE("cli: failed hypotheses exit falsified") {
  TempDir tmp;
  fs::path cfg = tmp.file("flat.cfg",
                          "grid { cells = 1 1 1 }\nmaterial { alpha = zero }\n");
  std::string out;
  int rc = run({"check", cfg.string()}, &out);
  CHECK(rc == kExitFalsified);
  CHECK(out.find("verdict falsified") != std::string::npos);
  CHECK(out.find("gamma0_positive fail") != std::string::npos);
}

TEST_CASE("cli: a pencil that cannot settle exits inconclusive") {
  TempDir tmp;
  fs::path cfg = tmp.file("slow.cfg", kSlowPencil);
  std::string out;
  int rc = run({"check", cfg.string()}, &out);
  CHECK(rc == kExitInconclusive);
  CHECK(out.find("verdict inconclusive") != std::string::npos);

  // a higher cap settles it
  int rc2 = run({"check", cfg.string(), "--nu-cap", "1e13"}, &out);
  CHECK(rc2 == kExitSuccess);
}

TEST_CASE("cli: simulate writes the energy log and report copy") {
  TempDir tmp;
  fs::path cfg = tmp.file("run.cfg",
                          "grid { cells = 2 2 2 }\n"
                          "schedule { dt = 0.05\nsteps = 8 }\n"
                          "source { channel = v\ntime = sine 1 }\n");
  fs::path outdir = tmp.path("results");
  std::string out;
  int rc = run({"simulate", cfg.string(), "--out-dir", outdir.string()}, &out);
  CHECK(rc == kExitSuccess);
  CHECK(fs::exists(outdir / "energy.csv"));
  CHECK(fs::exists(outdir / "report.txt"));
  CHECK(out.find("energy log:") != std::string::npos);
  CHECK(out.find("8 rows") != std::string::npos);

  std::ifstream csv(outdir / "energy.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first.rfind("step,time", 0) == 0);  // certified runs carry no watermark
}

TEST_CASE("cli: skip-check watermarks every output") {
  TempDir tmp;
  fs::path cfg = tmp.file("run.cfg",
                          "grid { cells = 2 2 2 }\n"
                          "schedule { dt = 0.05\nsteps = 3 }\n");
  fs::path outdir = tmp.path("wm");
  std::string out;
  int rc = run({"simulate", cfg.string(), "--skip-check", "--out-dir", outdir.string()}, &out);
  CHECK(rc == kExitSuccess);
  CHECK(out.find("UNCERTIFIED") != std::string::npos);
  std::ifstream csv(outdir / "energy.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first == "# UNCERTIFIED");
  CHECK_FALSE(fs::exists(outdir / "report.txt"));
}

TEST_CASE("cli: simulate without a schedule is an input error") {
  TempDir tmp;
  fs::path cfg = tmp.file("nosched.cfg", kMinimalFull);
  std::string out, err;
  int rc = run({"simulate", cfg.string()}, &out, &err);
  CHECK(rc == kExitInput);
  CHECK(err.find("schedule") != std::string::npos);
}

TEST_CASE("cli: reduce reports the reduced size and simulates on demand") {
  TempDir tmp;
  fs::path cfg = tmp.file("qs.cfg",
                          "mode = quasistatic\n"
                          "grid { cells = 2 2 2 }\n"
                          "material { sigma = zero }\n");
  std::string out;
  int rc = run({"reduce", cfg.string()}, &out);
  CHECK(rc == kExitSuccess);
  CHECK(out.find("reduced system: 104 unknowns") != std::string::npos);
  CHECK(out.find("verdict certified") != std::string::npos);

  fs::path cfg2 = tmp.file("qs-run.cfg",
                           "mode = quasistatic\n"
                           "grid { cells = 2 2 2 }\n"
                           "schedule { dt = 0.1\nsteps = 4 }\n"
                           "source { channel = psi_dot\ntime = ramp }\n"
                           "outputs { snapshot_stride = 2\nsnapshot_fields = E phi T }\n");
  fs::path outdir = tmp.path("qsout");
  int rc2 = run({"reduce", cfg2.string(), "--out-dir", outdir.string()}, &out);
  CHECK(rc2 == kExitSuccess);
  CHECK(fs::exists(outdir / "energy.csv"));
  CHECK(fs::exists(outdir / "E_2.snap"));
  CHECK(fs::exists(outdir / "phi_4.snap"));
  CHECK(fs::exists(outdir / "T_4.snap"));
  SnapshotData snap = read_snapshot((outdir / "E_2.snap").string());
  CHECK(snap.field.comps == 3);
  CHECK(snap.field.grid.num_cells() == 8);

  // full-model subcommand rejects a quasistatic config and vice versa
  std::string err;
  CHECK(run({"reduce", tmp.file("f.cfg", kMinimalFull).string()}, &out, &err) == kExitInput);
}

TEST_CASE("cli: usage and input failures") {
  std::string out, err;
  CHECK(run({"check", "/nonexistent/nowhere.cfg"}, &out, &err) == kExitInput);
  CHECK_FALSE(err.empty());

  TempDir tmp;
  fs::path bad = tmp.file("bad.cfg", "grid { cells = 2 2 2 }\nwhat = 1\n");
  err.clear();
  CHECK(run({"check", bad.string()}, &out, &err) == kExitInput);
  CHECK(err.find("unknown key 'what'") != std::string::npos);
  CHECK(err.find("line 2") != std::string::npos);

  CHECK(run({"check"}, &out, &err) == kExitInput);        // missing config path
  CHECK(run({"frobnicate"}, &out, &err) == kExitInput);   // unknown subcommand
  CHECK(run({"--help"}, &out, &err) == kExitSuccess);
  CHECK(run({"simulate", "--frotz", "x"}, &out, &err) == kExitInput);
}
