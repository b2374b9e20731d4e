// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_row(const EnergyRow& r) {
  std::ostringstream os;
  os << r.step << ',' << g17(r.time) << ',' << g17(r.energy) << ',' << g17(r.dissipation)
     << ',' << g17(r.source_work) << ',' << g17(r.balance_residual) << ','
     << g17(r.solve_residual);
  return os.str();
}

}  // namespace

void write_report(std::ostream& os, const WellposednessReport& rep) {
  os << "evopiezo-report 1\n";
  os << "verdict " << verdict_name(rep.verdict) << '\n';
  os << "nu_star " << g17(rep.nu_star) << '\n';
  os << "c0 " << g17(rep.c0) << '\n';
  if (rep.oracle_min_eig) os << "oracle_min_eig " << g17(*rep.oracle_min_eig) << '\n';
  os << "conditions " << rep.conditions.size() << '\n';
  for (const auto& c : rep.conditions)
    os << c.name << ' ' << (c.passed ? "pass" : "fail") << ' ' << g17(c.witness) << ' '
       << c.cell << '\n';
  os << "detail " << rep.detail << '\n';
}

std::string report_to_string(const WellposednessReport& rep) {
  std::ostringstream os;
  write_report(os, rep);
  return os.str();
}

WellposednessReport parse_report(std::istream& is) {
  auto bad = [](const std::string& why) -> FormatError {
    return FormatError("report: " + why);
  };
  std::string line;
  if (!std::getline(is, line) || line != "evopiezo-report 1")
    throw bad("missing or unsupported schema line");

  WellposednessReport rep;
  bool have_verdict = false, have_conditions = false, have_detail = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "verdict") {
      std::string v;
      ls >> v;
      if (v == "certified")
        rep.verdict = Verdict::Certified;
      else if (v == "falsified")
        rep.verdict = Verdict::Falsified;
      else if (v == "inconclusive")
        rep.verdict = Verdict::Inconclusive;
      else
        throw bad("unknown verdict \"" + v + "\"");
      have_verdict = true;
    } else if (key == "nu_star") {
      if (!(ls >> rep.nu_star)) throw bad("malformed nu_star line");
    } else if (key == "c0") {
      if (!(ls >> rep.c0)) throw bad("malformed c0 line");
    } else if (key == "oracle_min_eig") {
      double v;
      if (!(ls >> v)) throw bad("malformed oracle_min_eig line");
      rep.oracle_min_eig = v;
    } else if (key == "conditions") {
      std::size_t count = 0;
      if (!(ls >> count)) throw bad("malformed conditions line");
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(is, line)) throw bad("condition table shorter than declared");
        std::istringstream cs(line);
        ConditionResult c;
        std::string flag;
        if (!(cs >> c.name >> flag >> c.witness >> c.cell) || (flag != "pass" && flag != "fail"))
          throw bad("malformed condition row \"" + line + "\"");
        c.passed = flag == "pass";
        rep.conditions.push_back(std::move(c));
      }
      have_conditions = true;
    } else if (key == "detail") {
      rep.detail = line.size() > 7 ? line.substr(7) : std::string();
      have_detail = true;
    } else {
      throw bad("unknown key \"" + key + "\"");
    }
  }
  if (!have_verdict || !have_conditions || !have_detail)
    throw bad("missing verdict, conditions, or detail");
  return rep;
}

void write_energy_csv(std::ostream& os, const EnergyLog& log, bool uncertified) {
  if (uncertified) os << "# UNCERTIFIED\n";
  os << "step,time,energy,dissipation,source_work,balance_residual,solve_residual\n";
  for (const auto& r : log.rows) os << csv_row(r) << '\n';
  if (log.aborted) os << "# aborted: " << log.abort_reason << '\n';
}

void write_energy_csv(const std::string& path, const EnergyLog& log, bool uncertified) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("energy log: cannot open " + path + " for writing");
  write_energy_csv(os, log, uncertified);
  if (!os) throw FormatError("energy log: write failed for " + path);
}

}  // namespace evopiezo
