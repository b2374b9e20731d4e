// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/field.hpp"

#include <cmath>
#include <cstring>

#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::array<double, 6> voigt_encode(const std::array<double, 9>& a) {
  // symmetry gate: relative to the largest entry magnitude
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::fabs(x));
  double asym = std::max({std::fabs(a[1] - a[3]), std::fabs(a[2] - a[6]),
                          std::fabs(a[5] - a[7])});
  if (asym > 1e-12 * std::max(scale, 1e-300))
    throw InvalidArgument("voigt_encode: input asymmetry " + std::to_string(asym) +
                          " exceeds 1e-12 relative tolerance");
  return {a[0], a[4], a[8], kSqrt2 * 0.5 * (a[5] + a[7]),
          kSqrt2 * 0.5 * (a[2] + a[6]), kSqrt2 * 0.5 * (a[1] + a[3])};
}

std::array<double, 9> voigt_decode(const std::array<double, 6>& v) {
  double a23 = v[3] / kSqrt2, a13 = v[4] / kSqrt2, a12 = v[5] / kSqrt2;
  return {v[0], a12, a13,
          a12, v[1], a23,
          a13, a23, v[2]};
}

Field StateVector::extract(int comp) const {
  Field f(grid, dims.d[comp]);
  std::memcpy(f.values.data(), component(comp), f.values.size() * sizeof(double));
  return f;
}

void StateVector::insert(int comp, const Field& f) {
  if (f.comps != dims.d[comp] || f.grid.num_cells() != grid.num_cells())
    throw InvalidArgument("StateVector::insert: field shape mismatch for component " +
                          std::string(component_name(comp)));
  std::memcpy(component(comp), f.values.data(), f.values.size() * sizeof(double));
}

}  // namespace evopiezo
