// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_ERRORS_HPP
#define EVOPIEZO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evopiezo {

// All failures surface as typed exceptions.  Messages carry the offending
// quantity (cell index, achieved residual, byte counts) so callers can act
// on them without string parsing where a field is provided.

struct InvalidArgument : std::invalid_argument {
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

struct DegenerateGrid : InvalidArgument {
  explicit DegenerateGrid(const std::string& msg) : InvalidArgument(msg) {}
};

struct SingularCoefficient : std::runtime_error {
  long long cell;  // offending cell index, -1 if global
  explicit SingularCoefficient(const std::string& msg, long long cell_index = -1)
      : std::runtime_error(msg), cell(cell_index) {}
};

struct NotPositiveDefinite : std::runtime_error {
  long long cell;
  explicit NotPositiveDefinite(const std::string& msg, long long cell_index = -1)
      : std::runtime_error(msg), cell(cell_index) {}
};

struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PivotSingular : std::runtime_error {
  int block;  // pivot block index
  explicit PivotSingular(const std::string& msg, int block_index = -1)
      : std::runtime_error(msg), block(block_index) {}
};

struct SolverFailure : std::runtime_error {
  double achieved_residual;
  explicit SolverFailure(const std::string& msg, double residual)
      : std::runtime_error(msg), achieved_residual(residual) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  int line, column;
  explicit ConfigError(const std::string& msg, int l = 0, int c = 0)
      : std::runtime_error(msg), line(l), column(c) {}
};

}  // namespace evopiezo

#endif
