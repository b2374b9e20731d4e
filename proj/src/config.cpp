// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') {
        advance(text[i]);
        ++i;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    if (c == '{' || c == '}' || c == '=') {
      out.push_back({std::string(1, c), line, col});
      advance(c);
      ++i;
      continue;
    }
    Token t{std::string(), line, col};
    while (i < text.size()) {
      char d = text[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '{' || d == '}' || d == '=' ||
          d == '#')
        break;
      t.text.push_back(d);
      advance(d);
      ++i;
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct Entry {
  std::string key;
  int line = 0, col = 0;
  bool is_section = false;
  std::vector<Token> values;
  std::vector<Entry> children;
};

std::vector<Entry> parse_entries(const std::vector<Token>& ts, std::size_t& pos,
                                 const Token* open) {
  std::vector<Entry> out;
  while (pos < ts.size()) {
    if (ts[pos].text == "}") {
      if (!open) throw ConfigError("config: unmatched '}'", ts[pos].line, ts[pos].col);
      ++pos;
      return out;
    }
    const Token& k = ts[pos];
    if (k.text == "{" || k.text == "=")
      throw ConfigError("config: expected a key, got '" + k.text + "'", k.line, k.col);
    ++pos;
    if (pos >= ts.size())
      throw ConfigError("config: key '" + k.text + "' has no value", k.line, k.col);
    Entry e;
    e.key = k.text;
    e.line = k.line;
    e.col = k.col;
    if (ts[pos].text == "=") {
      ++pos;
      while (pos < ts.size() && ts[pos].line == k.line && ts[pos].text != "{" &&
             ts[pos].text != "}" && ts[pos].text != "=")
        e.values.push_back(ts[pos++]);
      if (e.values.empty())
        throw ConfigError("config: key '" + k.text + "' has an empty value", k.line, k.col);
    } else if (ts[pos].text == "{") {
      const Token& brace = ts[pos];
      ++pos;
      e.is_section = true;
      e.children = parse_entries(ts, pos, &brace);
    } else {
      throw ConfigError("config: key '" + k.text + "' must be followed by '=' or '{'",
                        ts[pos].line, ts[pos].col);
    }
    out.push_back(std::move(e));
  }
  if (open)
    throw ConfigError("config: '{' is never closed", open->line, open->col);
  return out;
}

double to_num(const Token& t) {
  const char* s = t.text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw ConfigError("config: expected a number, got '" + t.text + "'", t.line, t.col);
  return v;
}

long long to_int(const Token& t) {
  const char* s = t.text.c_str();
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    throw ConfigError("config: expected an integer, got '" + t.text + "'", t.line, t.col);
  return v;
}

[[noreturn]] void unknown_key(const Entry& e, const std::string& where) {
  throw ConfigError("config: unknown key '" + e.key + "' in " + where, e.line, e.col);
}

void expect_kv(const Entry& e, const std::string& where) {
  if (e.is_section)
    throw ConfigError("config: '" + e.key + "' in " + where + " must be 'key = value'",
                      e.line, e.col);
}

CoefficientBlock parse_block(const Entry& e, const Grid& g, int r, int c) {
  const auto& v = e.values;
  const std::string& form = v[0].text;
  const std::int64_t nc = g.num_cells();
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      throw ConfigError("config: block '" + e.key + "' form '" + form + "' takes " +
                            std::to_string(n - 1) + " argument(s), got " +
                            std::to_string(v.size() - 1),
                        e.line, e.col);
  };
  if (form == "identity") {
    if (r != c)
      throw ConfigError("config: block '" + e.key + "' is rectangular; identity not allowed",
                        e.line, e.col);
    if (v.size() == 1) return CoefficientBlock::identity(nc, r);
    need(2);
    return CoefficientBlock::identity(nc, r, to_num(v[1]));
  }
  if (form == "zero") {
    need(1);
    return CoefficientBlock::per_cell(nc, r, c);
  }
  if (form == "constant") {
    need(std::size_t(1 + r * c));
    std::vector<double> mtx(std::size_t(r * c));
    for (int i = 0; i < r * c; ++i) mtx[std::size_t(i)] = to_num(v[std::size_t(1 + i)]);
    return CoefficientBlock::per_cell_constant(nc, r, c, mtx);
  }
  if (form == "split") {
    need(std::size_t(3 + 2 * r * c));
    int axis = int(to_int(v[1]));
    long long cut = to_int(v[2]);
    if (axis < 0 || axis > 2)
      throw ConfigError("config: split axis must be 0, 1, or 2", v[1].line, v[1].col);
    CoefficientBlock blk = CoefficientBlock::per_cell(nc, r, c);
    for (std::int64_t cell = 0; cell < nc; ++cell) {
      const int side = g.coords(cell)[std::size_t(axis)] < cut ? 0 : 1;
      double* dst = blk.cell_data(cell);
      for (int i = 0; i < r * c; ++i)
        dst[i] = to_num(v[std::size_t(3 + side * r * c + i)]);
    }
    return blk;
  }
  if (form == "gaussian") {
    if (r != c)
      throw ConfigError("config: gaussian kernel needs a square block", e.line, e.col);
    need(7);
    if (v[1].text != "width" || v[3].text != "amplitude" || v[5].text != "shift")
      throw ConfigError("config: gaussian form is 'gaussian width <w> amplitude <a> shift <s>'",
                        e.line, e.col);
    return gaussian_convolution_block(g, to_num(v[2]), to_num(v[4]), to_num(v[6]), r);
  }
  throw ConfigError("config: unknown block form '" + form + "'", v[0].line, v[0].col);
}

Field parse_theta0(const Entry& e, const Grid& g) {
  const auto& v = e.values;
  Field f(g, 1);
  if (v[0].text == "constant" && v.size() == 2) {
    double val = to_num(v[1]);
    for (auto& x : f.values) x = val;
    return f;
  }
  if (v[0].text == "split" && v.size() == 5) {
    int axis = int(to_int(v[1]));
    long long cut = to_int(v[2]);
    if (axis < 0 || axis > 2)
      throw ConfigError("config: split axis must be 0, 1, or 2", v[1].line, v[1].col);
    double a = to_num(v[3]), b = to_num(v[4]);
    for (std::int64_t cell = 0; cell < g.num_cells(); ++cell)
      f.values[std::size_t(cell)] = g.coords(cell)[std::size_t(axis)] < cut ? a : b;
    return f;
  }
  throw ConfigError("config: theta0 takes 'constant <v>' or 'split <axis> <cut> <a> <b>'",
                    e.line, e.col);
}

struct BlockShape {
  int rows, cols;
};

const std::map<std::string, BlockShape>& block_shapes() {
  static const std::map<std::string, BlockShape> shapes{
      {"rho_star", {3, 3}}, {"C", {6, 6}},     {"e", {6, 3}},          {"lambda", {6, 1}},
      {"p", {3, 1}},        {"epsilon", {3, 3}}, {"mu", {3, 3}},       {"alpha", {1, 1}},
      {"sigma", {3, 3}},    {"kappa0_inv", {3, 3}}, {"kappa1", {3, 3}}, {"beta", {3, 3}},
  };
  return shapes;
}

MaterialConfig build_material(const Entry* sec, const Grid& g, int* sigma_line) {
  MaterialConfig m = identity_material(g);
  if (!sec) return m;
  bool engineering = false;
  std::set<std::string> seen;
  for (const auto& e : sec->children) {
    expect_kv(e, "material");
    if (!seen.insert(e.key).second)
      throw ConfigError("config: duplicate material key '" + e.key + "'", e.line, e.col);
    if (e.key == "convention") {
      const std::string& v = e.values[0].text;
      if (v == "engineering")
        engineering = true;
      else if (v != "weighted")
        throw ConfigError("config: convention must be 'weighted' or 'engineering'", e.line,
                          e.col);
      continue;
    }
    if (e.key == "theta0") {
      m.theta0 = parse_theta0(e, g);
      continue;
    }
    auto it = block_shapes().find(e.key);
    if (it == block_shapes().end()) unknown_key(e, "material");
    CoefficientBlock blk = parse_block(e, g, it->second.rows, it->second.cols);
    if (e.key == "rho_star")
      m.rho_star = std::move(blk);
    else if (e.key == "C")
      m.C = std::move(blk);
    else if (e.key == "e")
      m.e = std::move(blk);
    else if (e.key == "lambda")
      m.lambda = std::move(blk);
    else if (e.key == "p")
      m.p = std::move(blk);
    else if (e.key == "epsilon")
      m.epsilon = std::move(blk);
    else if (e.key == "mu")
      m.mu = std::move(blk);
    else if (e.key == "alpha")
      m.alpha = std::move(blk);
    else if (e.key == "sigma") {
      m.sigma = std::move(blk);
      *sigma_line = e.line;
    } else if (e.key == "kappa0_inv")
      m.kappa0_inv = std::move(blk);
    else if (e.key == "kappa1")
      m.kappa1 = std::move(blk);
    else if (e.key == "beta")
      m.beta = std::move(blk);
  }
  if (engineering) {
    // stress-indexed inputs arrive in unweighted Voigt components; the
    // internal convention carries sqrt(2) on the shear slots
    const double s = std::sqrt(2.0);
    std::vector<double> dmat(36, 0.0);
    for (int i = 0; i < 6; ++i) dmat[std::size_t(i * 6 + i)] = i < 3 ? 1.0 : s;
    CoefficientBlock D =
        CoefficientBlock::per_cell_constant(g.num_cells(), 6, 6, dmat);
    m.C = block_mul(block_mul(D, m.C), D);
    m.e = block_mul(D, m.e);
    m.lambda = block_mul(D, m.lambda);
  }
  return make_material_config(std::move(m));
}

int channel_dim(const std::string& ch, SimulationSpec::Mode mode) {
  if (ch == "v") return 3;
  if (ch == "T") return 6;
  if (ch == "theta_rel") return 1;
  if (ch == "q") return 3;
  if (mode == SimulationSpec::Mode::Full) {
    if (ch == "E") return 3;
    if (ch == "H") return 3;
  } else {
    if (ch == "psi" || ch == "psi_dot") return 1;
  }
  return -1;
}

SourceSpec parse_source(const Entry& sec, SimulationSpec::Mode mode) {
  SourceSpec s;
  std::set<std::string> seen;
  for (const auto& e : sec.children) {
    expect_kv(e, "source");
    if (!seen.insert(e.key).second)
      throw ConfigError("config: duplicate source key '" + e.key + "'", e.line, e.col);
    const auto& v = e.values;
    if (e.key == "channel") {
      s.channel = v[0].text;
    } else if (e.key == "component") {
      s.component = int(to_int(v[0]));
    } else if (e.key == "spatial") {
      if (v[0].text == "constant" && v.size() == 2) {
        s.spatial = SourceSpec::Spatial::Constant;
        s.value = to_num(v[1]);
      } else if (v[0].text == "gaussian-bump" && v.size() == 9 && v[1].text == "center" &&
                 v[5].text == "width" && v[7].text == "amplitude") {
        s.spatial = SourceSpec::Spatial::GaussianBump;
        s.center = {to_num(v[2]), to_num(v[3]), to_num(v[4])};
        s.width = to_num(v[6]);
        s.amplitude = to_num(v[8]);
        if (!(s.width > 0.0))
          throw ConfigError("config: gaussian-bump width must be positive", e.line, e.col);
      } else {
        throw ConfigError("config: spatial takes 'constant <v>' or 'gaussian-bump center "
                          "<x> <y> <z> width <w> amplitude <a>'",
                          e.line, e.col);
      }
    } else if (e.key == "time") {
      if (v[0].text == "constant" && v.size() == 1) {
        s.time = SourceSpec::Time::Constant;
      } else if (v[0].text == "sine" && v.size() == 2) {
        s.time = SourceSpec::Time::Sine;
        s.freq = to_num(v[1]);
      } else if (v[0].text == "ramp" && v.size() == 1) {
        s.time = SourceSpec::Time::Ramp;
      } else if (v[0].text == "step" && v.size() == 2) {
        s.time = SourceSpec::Time::Step;
        s.onset = to_num(v[1]);
      } else {
        throw ConfigError(
            "config: time takes 'constant', 'sine <freq>', 'ramp', or 'step <t0>'", e.line,
            e.col);
      }
    } else {
      unknown_key(e, "source");
    }
  }
  if (s.channel.empty())
    throw ConfigError("config: source needs a channel", sec.line, sec.col);
  int dim = channel_dim(s.channel, mode);
  if (dim < 0)
    throw ConfigError("config: channel '" + s.channel + "' does not exist in this mode",
                      sec.line, sec.col);
  if (s.component < 0 || s.component >= dim)
    throw ConfigError("config: component " + std::to_string(s.component) +
                          " out of range for channel '" + s.channel + "' (dimension " +
                          std::to_string(dim) + ")",
                      sec.line, sec.col);
  return s;
}

bool valid_snapshot_field(const std::string& name, SimulationSpec::Mode mode) {
  if (name == "v" || name == "T" || name == "theta_rel" || name == "q") return true;
  if (mode == SimulationSpec::Mode::Full) return name == "E" || name == "H";
  return name == "E" || name == "phi";
}

}  // namespace

double source_time_factor(const SourceSpec& s, double t) {
  switch (s.time) {
    case SourceSpec::Time::Constant:
      return 1.0;
    case SourceSpec::Time::Sine:
      return std::sin(2.0 * std::numbers::pi * s.freq * t);
    case SourceSpec::Time::Ramp:
      return t;
    default:
      return t >= s.onset ? 1.0 : 0.0;
  }
}

Field source_spatial_field(const SourceSpec& s, const Grid& g, int comps) {
  if (s.component < 0 || s.component >= comps)
    throw InvalidArgument("source: component index out of range");
  Field f(g, comps);
  for (std::int64_t c = 0; c < g.num_cells(); ++c) {
    double val;
    if (s.spatial == SourceSpec::Spatial::Constant) {
      val = s.value;
    } else {
      auto x = g.center(c);
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) d2 += (x[std::size_t(k)] - s.center[std::size_t(k)]) *
                                        (x[std::size_t(k)] - s.center[std::size_t(k)]);
      val = s.amplitude * std::exp(-d2 / (2.0 * s.width * s.width));
    }
    f.at(c, s.component) = val;
  }
  return f;
}

SimulationSpec parse_config(const std::string& text) {
  auto tokens = tokenize(text);
  std::size_t pos = 0;
  auto entries = parse_entries(tokens, pos, nullptr);

  SimulationSpec spec;
  const Entry* grid_sec = nullptr;
  const Entry* mat_sec = nullptr;
  const Entry* sched_sec = nullptr;
  const Entry* solver_sec = nullptr;
  const Entry* out_sec = nullptr;
  const Entry* boundary_sec = nullptr;
  std::vector<const Entry*> source_secs;

  std::set<std::string> seen_top;
  for (const auto& e : entries) {
    if (e.key == "source") {
      if (!e.is_section)
        throw ConfigError("config: 'source' must be a section", e.line, e.col);
      source_secs.push_back(&e);
      continue;
    }
    if (!seen_top.insert(e.key).second)
      throw ConfigError("config: duplicate top-level key '" + e.key + "'", e.line, e.col);
    if (e.key == "mode") {
      expect_kv(e, "the top level");
      const std::string& v = e.values[0].text;
      if (v == "full")
        spec.mode = SimulationSpec::Mode::Full;
      else if (v == "quasistatic")
        spec.mode = SimulationSpec::Mode::Quasistatic;
      else
        throw ConfigError("config: mode must be 'full' or 'quasistatic'", e.line, e.col);
    } else if (e.key == "grid") {
      grid_sec = &e;
    } else if (e.key == "material") {
      mat_sec = &e;
    } else if (e.key == "schedule") {
      sched_sec = &e;
    } else if (e.key == "solver") {
      solver_sec = &e;
    } else if (e.key == "outputs") {
      out_sec = &e;
    } else if (e.key == "boundary") {
      boundary_sec = &e;
    } else {
      unknown_key(e, "the top level");
    }
  }

  if (!grid_sec || !grid_sec->is_section)
    throw ConfigError("config: a grid section with 'cells' is required", 1, 1);
  std::array<int, 3> cells{0, 0, 0};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  bool have_cells = false;
  for (const auto& e : grid_sec->children) {
    expect_kv(e, "grid");
    if (e.key == "cells") {
      if (e.values.size() != 3)
        throw ConfigError("config: cells takes three integers", e.line, e.col);
      for (int k = 0; k < 3; ++k) cells[std::size_t(k)] = int(to_int(e.values[std::size_t(k)]));
      have_cells = true;
    } else if (e.key == "length") {
      if (e.values.size() != 3)
        throw ConfigError("config: length takes three numbers", e.line, e.col);
      for (int k = 0; k < 3; ++k) length[std::size_t(k)] = to_num(e.values[std::size_t(k)]);
    } else {
      unknown_key(e, "grid");
    }
  }
  if (!have_cells)
    throw ConfigError("config: grid needs 'cells'", grid_sec->line, grid_sec->col);
  Grid grid;
  try {
    grid = make_grid(cells, length);
  } catch (const DegenerateGrid& ex) {
    throw ConfigError(std::string("config: ") + ex.what(), grid_sec->line, grid_sec->col);
  }

  int sigma_line = 0;
  try {
    spec.material = build_material(mat_sec, grid, &sigma_line);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("config: material rejected: ") + ex.what(),
                      mat_sec ? mat_sec->line : 0, mat_sec ? mat_sec->col : 0);
  }

  if (spec.mode == SimulationSpec::Mode::Quasistatic) {
    double worst = 0.0;
    for (double v : spec.material.sigma.data) worst = std::max(worst, std::fabs(v));
    if (worst != 0.0)
      throw ConfigError("config: quasistatic mode requires sigma = 0 (the reduction assumes "
                        "no conduction current)",
                        sigma_line, 0);
  }

  if (boundary_sec) {
    for (const auto& e : boundary_sec->children) {
      expect_kv(e, "boundary");
      const std::string& v = e.values[0].text;
      bool ok = (e.key == "velocity" && v == "clamped") ||
                (e.key == "electric" && v == "grounded") ||
                (e.key == "thermal" && v == "insulated");
      if (!ok)
        throw ConfigError("config: only the built-in boundary triple is supported "
                          "(velocity=clamped, electric=grounded, thermal=insulated)",
                          e.line, e.col);
    }
  }

  if (sched_sec) {
    spec.has_schedule = true;
    bool have_dt = false, have_steps = false;
    for (const auto& e : sched_sec->children) {
      expect_kv(e, "schedule");
      if (e.key == "dt") {
        spec.schedule.dt = to_num(e.values[0]);
        have_dt = true;
      } else if (e.key == "steps") {
        spec.schedule.steps = to_int(e.values[0]);
        have_steps = true;
      } else if (e.key == "theta") {
        spec.schedule.theta = to_num(e.values[0]);
      } else {
        unknown_key(e, "schedule");
      }
    }
    if (!have_dt || !have_steps)
      throw ConfigError("config: schedule needs 'dt' and 'steps'", sched_sec->line,
                        sched_sec->col);
    try {
      spec.schedule.validate();
    } catch (const InvalidArgument& ex) {
      throw ConfigError(std::string("config: ") + ex.what(), sched_sec->line, sched_sec->col);
    }
  }

  if (solver_sec) {
    for (const auto& e : solver_sec->children) {
      expect_kv(e, "solver");
      if (e.key == "tolerance") {
        spec.solver_tol = to_num(e.values[0]);
        if (!(spec.solver_tol > 0.0))
          throw ConfigError("config: solver tolerance must be positive", e.line, e.col);
      } else if (e.key == "method") {
        const std::string& v = e.values[0].text;
        if (v == "auto")
          spec.method = SolveMethod::Auto;
        else if (v == "direct")
          spec.method = SolveMethod::Direct;
        else if (v == "iterative")
          spec.method = SolveMethod::Iterative;
        else
          throw ConfigError("config: method must be 'auto', 'direct', or 'iterative'", e.line,
                            e.col);
      } else {
        unknown_key(e, "solver");
      }
    }
  }

  if (out_sec) {
    for (const auto& e : out_sec->children) {
      expect_kv(e, "outputs");
      if (e.key == "energy_log") {
        if (e.values.size() != 1)
          throw ConfigError("config: energy_log takes one path token", e.line, e.col);
        spec.energy_log = e.values[0].text;
      } else if (e.key == "snapshot_stride") {
        spec.snapshot_stride = to_int(e.values[0]);
        if (spec.snapshot_stride < 0)
          throw ConfigError("config: snapshot_stride must be >= 0", e.line, e.col);
      } else if (e.key == "snapshot_fields") {
        for (const auto& t : e.values) {
          if (!valid_snapshot_field(t.text, spec.mode))
            throw ConfigError("config: unknown snapshot field '" + t.text + "' for this mode",
                              t.line, t.col);
          spec.snapshot_fields.push_back(t.text);
        }
      } else {
        unknown_key(e, "outputs");
      }
    }
  }

  for (const Entry* s : source_secs) spec.sources.push_back(parse_source(*s, spec.mode));
  return spec;
}

SimulationSpec load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

SourceFn make_source(const SimulationSpec& spec) {
  if (spec.mode != SimulationSpec::Mode::Full)
    throw InvalidArgument("make_source: full-model layout requested for a reduced run");
  const auto& m = spec.material;
  const std::int64_t nc = m.grid.num_cells();

  struct Part {
    std::int64_t base;
    std::vector<double> values;
    SourceSpec s;
  };
  auto parts = std::make_shared<std::vector<Part>>();
  for (const auto& s : spec.sources) {
    int comp = -1;
    for (int k = 0; k < 6; ++k)
      if (s.channel == component_name(k)) comp = k;
    if (comp < 0) throw InvalidArgument("make_source: channel '" + s.channel + "' unknown");
    Field f = source_spatial_field(s, m.grid, m.dims.d[std::size_t(comp)]);
    parts->push_back({nc * m.dims.offset(comp), std::move(f.values), s});
  }
  const std::int64_t n = nc * m.dims.total();
  return [parts, n](double t, std::vector<double>& f) {
    f.assign(std::size_t(n), 0.0);
    for (const auto& p : *parts) {
      double tf = source_time_factor(p.s, t);
      if (tf == 0.0) continue;
      for (std::size_t i = 0; i < p.values.size(); ++i)
        f[std::size_t(p.base) + i] += tf * p.values[i];
    }
  };
}

}  // namespace evopiezo
