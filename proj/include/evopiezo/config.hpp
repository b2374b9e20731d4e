// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_CONFIG_HPP
#define EVOPIEZO_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evopiezo/evolution.hpp"
#include "evopiezo/material.hpp"

namespace evopiezo {

// One source channel: a spatial profile scaled by a time profile.
// channel names the state component it feeds (v, T, E, H, theta_rel, q in
// the full model; v, T, theta_rel, q plus psi and psi_dot in the
// quasistatic model), component the index within that channel.
struct SourceSpec {
  enum class Spatial { Constant, GaussianBump };
  enum class Time { Constant, Sine, Ramp, Step };

  std::string channel;
  int component = 0;

  Spatial spatial = Spatial::Constant;
  double value = 1.0;  // constant profile amplitude
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double width = 0.1;
  double amplitude = 1.0;

  Time time = Time::Constant;
  double freq = 1.0;   // cycles per unit time for sine
  double onset = 0.0;  // step switch-on time
};

// constant -> 1, sine -> sin(2 pi freq t), ramp -> t, step -> [t >= onset]
double source_time_factor(const SourceSpec& s, double t);
// profile sampled at cell centers into component s.component of a
// comps-wide field
Field source_spatial_field(const SourceSpec& s, const Grid& g, int comps);

// A parsed and validated run description.  The grammar is line-oriented
// key = value pairs inside named { } sections; see the README for the
// normative description.  Unknown keys are errors.
struct SimulationSpec {
  enum class Mode { Full, Quasistatic };

  Mode mode = Mode::Full;
  MaterialConfig material;  // carries the grid
  std::vector<SourceSpec> sources;

  bool has_schedule = false;
  Schedule schedule;

  double solver_tol = 1e-12;
  SolveMethod method = SolveMethod::Auto;

  std::string energy_log = "energy.csv";
  std::int64_t snapshot_stride = 0;  // 0 = snapshots off
  std::vector<std::string> snapshot_fields;
};

// Structured diagnostics only: every failure is a ConfigError carrying the
// line and column, never a crash.
SimulationSpec parse_config(const std::string& text);
SimulationSpec load_config(const std::string& path);

// Assembled full-model right-hand side on the 19-component layout.
SourceFn make_source(const SimulationSpec& spec);

}  // namespace evopiezo

#endif
