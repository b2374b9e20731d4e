// SPDX-License-Identifier: Apache-2.0
#include "evopiezo/snapshot.hpp"

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "evopiezo/errors.hpp"

namespace evopiezo {

namespace {

constexpr const char* kMagic = "EVOPIEZO1";

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (unsigned char c : name)
    if (c <= 0x20 || c == 0x7f) return false;
  return true;
}

void encode_le(double v, unsigned char* out) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out[i] = (unsigned char)(bits >> (8 * i));
}

double decode_le(const unsigned char* in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(in[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_snapshot(const Field& f, std::ostream& os, const std::string& name) {
  if (!valid_name(name))
    throw InvalidArgument("snapshot: name must be a nonempty single token without "
                          "whitespace, got \"" + name + "\"");
  if (f.comps < 1 || std::int64_t(f.values.size()) != f.num_cells() * f.comps)
    throw InvalidArgument("snapshot: field storage does not match its shape");

  os << kMagic << ' ' << name << ' ' << f.grid.n[0] << ' ' << f.grid.n[1] << ' '
     << f.grid.n[2] << ' ' << f.comps << '\n';
  std::vector<unsigned char> buf(f.values.size() * 8);
  for (std::size_t i = 0; i < f.values.size(); ++i) encode_le(f.values[i], buf.data() + 8 * i);
  os.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!os) throw FormatError("snapshot: write failed");
}

void write_snapshot(const Field& f, const std::string& path, const std::string& name) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("snapshot: cannot open " + path + " for writing");
  write_snapshot(f, os, name);
}

SnapshotData read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("snapshot: missing header line");
  std::istringstream hs(header);
  std::string magic, name;
  long long n1 = 0, n2 = 0, n3 = 0, comps = 0;
  if (!(hs >> magic >> name >> n1 >> n2 >> n3 >> comps))
    throw FormatError("snapshot: malformed header \"" + header + "\"");
  std::string extra;
  if (hs >> extra) throw FormatError("snapshot: trailing header token \"" + extra + "\"");
  if (magic != kMagic)
    throw FormatError("snapshot: bad magic \"" + magic + "\", expected " + kMagic);
  if (n1 < 1 || n2 < 1 || n3 < 1 || comps < 1)
    throw FormatError("snapshot: nonpositive dimension in header \"" + header + "\"");
  constexpr long long kMaxAxis = 1ll << 20;
  constexpr long long kMaxValues = 1ll << 30;
  if (n1 > kMaxAxis || n2 > kMaxAxis || n3 > kMaxAxis || comps > kMaxAxis ||
      n1 * n2 * n3 > kMaxValues / comps)
    throw FormatError("snapshot: header declares more than " + std::to_string(kMaxValues) +
                      " values");

  SnapshotData out;
  out.name = name;
  out.field = Field(make_grid({int(n1), int(n2), int(n3)}, {1.0, 1.0, 1.0}), int(comps));

  const std::uint64_t expected = std::uint64_t(out.field.values.size()) * 8;
  std::vector<unsigned char> buf(expected);
  is.read(reinterpret_cast<char*>(buf.data()), std::streamsize(expected));
  const std::uint64_t got = std::uint64_t(is.gcount());
  if (got != expected)
    throw FormatError("snapshot: payload truncated (expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(got) + ")");
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("snapshot: trailing data after " + std::to_string(expected) +
                      " payload bytes");
  for (std::size_t i = 0; i < out.field.values.size(); ++i)
    out.field.values[i] = decode_le(buf.data() + 8 * i);
  return out;
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("snapshot: cannot open " + path);
  return read_snapshot(is);
}

}  // namespace evopiezo
