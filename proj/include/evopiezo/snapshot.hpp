// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_SNAPSHOT_HPP
#define EVOPIEZO_SNAPSHOT_HPP

#include <iosfwd>
#include <string>

#include "evopiezo/field.hpp"

namespace evopiezo {

// On-disk field format: one text header line
//   EVOPIEZO1 <name> <n1> <n2> <n3> <comps>
// terminated by a single '\n', followed by n1*n2*n3*comps little-endian
// 64-bit floats in the Field layout (row-major cells, per-cell components
// contiguous).  The byte stream is defined independently of host byte
// order; round trips reproduce every payload bit, NaN patterns included.
// The header stores no physical lengths; readers get a unit box.
struct SnapshotData {
  std::string name;
  Field field;
};

// name must be a single token: nonempty, no whitespace or control bytes
void write_snapshot(const Field& f, std::ostream& os, const std::string& name = "field");
void write_snapshot(const Field& f, const std::string& path, const std::string& name = "field");

// malformed header, truncated or oversized payload -> FormatError carrying
// expected/actual byte counts where applicable
SnapshotData read_snapshot(std::istream& is);
SnapshotData read_snapshot(const std::string& path);

}  // namespace evopiezo

#endif
