// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "evopiezo/errors.hpp"
#include "evopiezo/evolution.hpp"

using namespace evopiezo;

namespace {

std::mt19937_64 rng(99);

std::vector<double> random_state(std::int64_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (double& v : u) v = d(rng);
  return u;
}

// frozen material: no conduction, no relaxation, so M1 = 0 and the
// midpoint rule conserves (1/2)<M0 u, u> exactly
MaterialConfig conservative_material(const Grid& g) {
  MaterialConfig m = identity_material(g);
  m.kappa0_inv = CoefficientBlock::per_cell(g.num_cells(), 3, 3);  // zero
  return make_material_config(std::move(m));
}

}  // namespace

TEST_CASE("schedule validation messages name the offending field") {
  Schedule s;
  s.dt = 0.0;
  s.steps = 10;
  CHECK_THROWS_WITH_AS(s.validate(), "schedule: dt must be positive", InvalidArgument);
  s.dt = 0.1;
  s.steps = 0;
  CHECK_THROWS_WITH_AS(s.validate(), "schedule: steps must be at least 1", InvalidArgument);
  s.steps = 3;
  s.theta = 0.25;
  CHECK_THROWS_WITH_AS(s.validate(), "schedule: theta out of [0.5,1]", InvalidArgument);
  s.theta = 1.0;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("discrete system rejects a reduced-layout material") {
  Grid g = make_grid({2, 2, 2}, {1, 1, 1});
  MaterialConfig m = identity_material(g, ComponentDims::scalar());
  CHECK_THROWS_AS(build_discrete_system(m), InvalidArgument);
}

TEST_CASE("midpoint rule conserves the M0 energy without dissipation") {
  Grid g = make_grid({3, 3, 3}, {1, 1, 1});
  DiscreteSystem sys = build_discrete_system(conservative_material(g));

  std::vector<double> u0 = random_state(sys.n);
  std::vector<double> m0u(std::size_t(sys.n));
  sys.apply_m0(u0, m0u);
  const double e0 = 0.5 * dot_serial(m0u, u0);

  Schedule sched;
  sched.dt = 0.02;
  sched.steps = 200;
  EnergyLog log;
  SourceFn zero = [](double, std::vector<double>& f) { std::fill(f.begin(), f.end(), 0.0); };
  simulate(sys, u0, zero, sched, log);

  REQUIRE_FALSE(log.aborted);
  REQUIRE(log.rows.size() == 200);
  for (const auto& row : log.rows) {
    CHECK(std::fabs(row.energy - e0) <= 1e-11 * std::max(1.0, e0));
    CHECK(row.dissipation == 0.0);
    CHECK(row.source_work == 0.0);
  }
}

TEST_CASE("per-step balance residual stays at solver level with a live source") {
  Grid g = make_grid({2, 2, 2}, {1, 1, 1});
  MaterialConfig m = identity_material(g);
  m.sigma = CoefficientBlock::identity(g.num_cells(), 3, 1.0);
  m = make_material_config(std::move(m));
  DiscreteSystem sys = build_discrete_system(m);

  std::vector<double> profile = random_state(sys.n);
  SourceFn src = [&profile](double t, std::vector<double>& f) {
    double amp = std::sin(3.0 * t);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = amp * profile[i];
  };

  Schedule sched;
  sched.dt = 0.05;
  sched.steps = 120;

  std::vector<double> norms;
  SnapshotFn track = [&norms](std::int64_t, double, const std::vector<double>& u) {
    norms.push_back(std::sqrt(dot_serial(u, u)));
  };

  EnergyLog log;
  simulate(sys, random_state(sys.n), src, sched, log, 1e-12, SolveMethod::Auto, track, 1);

  REQUIRE_FALSE(log.aborted);
  REQUIRE(norms.size() == log.rows.size());
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    CHECK(std::fabs(log.rows[k].balance_residual) <= 10.0 * 1e-12 * std::max(1.0, norms[k]));
    CHECK(log.rows[k].dissipation >= 0.0);
  }
}

TEST_CASE("implicit euler dissipates when M1 is positive semidefinite") {
  Grid g = make_grid({2, 2, 2}, {1, 1, 1});
  MaterialConfig m = identity_material(g);
  m.sigma = CoefficientBlock::identity(g.num_cells(), 3, 0.5);
  m = make_material_config(std::move(m));
  DiscreteSystem sys = build_discrete_system(m);

  Schedule sched;
  sched.dt = 0.1;
  sched.steps = 50;
  sched.theta = 1.0;
  EnergyLog log;
  SourceFn zero = [](double, std::vector<double>& f) { std::fill(f.begin(), f.end(), 0.0); };
  std::vector<double> u0 = random_state(sys.n);
  std::vector<double> m0u(std::size_t(sys.n));
  sys.apply_m0(u0, m0u);
  double prev = 0.5 * dot_serial(m0u, u0);
  simulate(sys, u0, zero, sched, log);

  REQUIRE_FALSE(log.aborted);
  for (const auto& row : log.rows) {
    CHECK(row.energy <= prev + 1e-12);
    prev = row.energy;
  }
}

TEST_CASE("state stays identically quiet until the source switches on") {
  Grid g = make_grid({2, 2, 2}, {1, 1, 1});
  DiscreteSystem sys = build_discrete_system(conservative_material(g));

  const double onset = 0.35;
  std::vector<double> profile = random_state(sys.n);
  SourceFn src = [&](double t, std::vector<double>& f) {
    double amp = t < onset ? 0.0 : 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = amp * profile[i];
  };

  Schedule sched;
  sched.dt = 0.05;
  sched.steps = 20;
  std::vector<double> norms;
  SnapshotFn track = [&norms](std::int64_t, double, const std::vector<double>& u) {
    norms.push_back(std::sqrt(dot_serial(u, u)));
  };
  EnergyLog log;
  simulate(sys, std::vector<double>(std::size_t(sys.n), 0.0), src, sched, log, 1e-12,
           SolveMethod::Auto, track, 1);

  REQUIRE_FALSE(log.aborted);
  // source samples at t = (k + 1/2) dt; first nonzero sample is step k = 6
  for (std::size_t k = 0; k < norms.size(); ++k) {
    if ((double(k) + 0.5) * sched.dt < onset)
      CHECK(norms[k] <= 1e-10);
    else if (k >= 7)
      CHECK(norms[k] > 1e-6);
  }
}

TEST_CASE("snapshot stride picks every n-th step") {
  Grid g = make_grid({2, 1, 1}, {1, 1, 1});
  DiscreteSystem sys = build_discrete_system(conservative_material(g));
  Schedule sched;
  sched.dt = 0.1;
  sched.steps = 10;
  std::vector<std::int64_t> seen;
  SnapshotFn track = [&seen](std::int64_t k, double, const std::vector<double>&) {
    seen.push_back(k);
  };
  EnergyLog log;
  SourceFn zero = [](double, std::vector<double>& f) { std::fill(f.begin(), f.end(), 0.0); };
  simulate(sys, random_state(sys.n), zero, sched, log, 1e-12, SolveMethod::Auto, track, 4);
  CHECK(seen == std::vector<std::int64_t>{4, 8});
}

TEST_CASE("stepper reports solver-level residuals and matches step()") {
  Grid g = make_grid({2, 2, 1}, {1, 1, 1});
  DiscreteSystem sys = build_discrete_system(conservative_material(g));
  ThetaStepper st(sys, 0.05, 0.5);
  std::vector<double> u = random_state(sys.n);
  std::vector<double> f(std::size_t(sys.n), 0.1);
  std::vector<double> next(std::size_t(sys.n));
  double res = st.advance(u, f, next);
  CHECK(res <= 1e-12);
  std::vector<double> via_step = step(sys, u, f, 0.05, 0.5);
  for (std::size_t i = 0; i < next.size(); ++i)
    CHECK(next[i] == doctest::Approx(via_step[i]).epsilon(1e-13));
}
