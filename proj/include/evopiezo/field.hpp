// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_FIELD_HPP
#define EVOPIEZO_FIELD_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evopiezo/grid.hpp"

namespace evopiezo {

// Cell data, row-major over cells with the per-cell components contiguous:
// values[c*comps + k].  Scalar fields have comps=1, vector fields 3, stress
// in the weighted Voigt encoding 6.
struct Field {
  Grid grid;
  int comps = 1;
  std::vector<double> values;

  Field() = default;
  Field(const Grid& g, int ncomp)
      : grid(g), comps(ncomp), values(std::size_t(g.num_cells()) * ncomp, 0.0) {}

  std::int64_t num_cells() const { return grid.num_cells(); }
  double* cell(std::int64_t c) { return values.data() + c * comps; }
  const double* cell(std::int64_t c) const { return values.data() + c * comps; }
  double& at(std::int64_t c, int k) { return values[c * comps + k]; }
  double at(std::int64_t c, int k) const { return values[c * comps + k]; }
};

// Weighted Voigt encoding of a symmetric 3x3 matrix:
// (a11, a22, a33, sqrt2*a23, sqrt2*a13, sqrt2*a12).
// With this weighting the Euclidean inner product of two encodings equals
// the Frobenius inner product of the matrices.  encode checks symmetry of
// the input to 1e-12 relative and throws InvalidArgument beyond it.
std::array<double, 6> voigt_encode(const std::array<double, 9>& a_rowmajor);
std::array<double, 9> voigt_decode(const std::array<double, 6>& v);

// Per-component state dimensions in cell order (v, T, E, H, theta_rel, q).
// theta_rel stores Theta0^{-1} theta.  The physical signature is
// (3,6,3,3,1,3); tests also instantiate the all-ones scalar signature.
struct ComponentDims {
  std::array<int, 6> d{3, 6, 3, 3, 1, 3};

  static ComponentDims physical() { return ComponentDims{}; }
  static ComponentDims scalar() { return ComponentDims{{1, 1, 1, 1, 1, 1}}; }

  int total() const {
    int s = 0;
    for (int x : d) s += x;
    return s;
  }
  int offset(int comp) const {
    int s = 0;
    for (int i = 0; i < comp; ++i) s += d[i];
    return s;
  }
};

inline const char* component_name(int comp) {
  static const char* names[6] = {"v", "T", "E", "H", "theta_rel", "q"};
  return names[comp];
}

// Full state, stored as one contiguous vector ordered (v, T, E, H,
// theta_rel, q), each component field row-major over cells with per-cell
// components contiguous.
struct StateVector {
  Grid grid;
  ComponentDims dims;
  std::vector<double> data;

  StateVector() = default;
  StateVector(const Grid& g, const ComponentDims& cd = ComponentDims::physical())
      : grid(g), dims(cd), data(std::size_t(g.num_cells()) * cd.total(), 0.0) {}

  std::int64_t size() const { return std::int64_t(data.size()); }
  std::int64_t component_offset(int comp) const {
    return grid.num_cells() * dims.offset(comp);
  }
  double* component(int comp) { return data.data() + component_offset(comp); }
  const double* component(int comp) const { return data.data() + component_offset(comp); }
  // entry for (component, cell, index within cell)
  double& at(int comp, std::int64_t c, int k) {
    return data[component_offset(comp) + c * dims.d[comp] + k];
  }
  double at(int comp, std::int64_t c, int k) const {
    return data[component_offset(comp) + c * dims.d[comp] + k];
  }
  Field extract(int comp) const;
  void insert(int comp, const Field& f);
};

// Reduced state (v, T, theta_rel, q): same storage scheme, component axes
// (3,6,1,3) physical.
struct ReducedDims {
  std::array<int, 4> d{3, 6, 1, 3};
  int total() const { return d[0] + d[1] + d[2] + d[3]; }
  int offset(int comp) const {
    int s = 0;
    for (int i = 0; i < comp; ++i) s += d[i];
    return s;
  }
};

}  // namespace evopiezo

#endif
