// SPDX-License-Identifier: Apache-2.0
#ifndef EVOPIEZO_REPORT_HPP
#define EVOPIEZO_REPORT_HPP

#include <iosfwd>
#include <string>

#include "evopiezo/evolution.hpp"
#include "evopiezo/wellposedness.hpp"

namespace evopiezo {

// Line-oriented report text, schema-versioned:
//   evopiezo-report 1
//   verdict <certified|falsified|inconclusive>
//   nu_star <g17>
//   c0 <g17>
//   oracle_min_eig <g17>          (only when the oracle ran)
//   conditions <count>
//   <name> <pass|fail> <witness g17> <cell>
//   ...
//   detail <free text to end of line>
// Condition names never contain whitespace, so every line splits on spaces.
void write_report(std::ostream& os, const WellposednessReport& rep);
std::string report_to_string(const WellposednessReport& rep);

// Inverse of write_report; malformed input -> FormatError.
WellposednessReport parse_report(std::istream& is);

// Energy log CSV.  Layout, in order: an optional "# UNCERTIFIED" watermark
// line, the fixed column header, one row per completed step with every
// number at 17 significant digits, and a "# aborted: <reason>" trailer row
// when the run stopped early.
void write_energy_csv(std::ostream& os, const EnergyLog& log, bool uncertified = false);
void write_energy_csv(const std::string& path, const EnergyLog& log, bool uncertified = false);

}  // namespace evopiezo

#endif
