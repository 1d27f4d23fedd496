#include "torusns/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusns {
namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(b.data(), 8);
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

void put_header(std::ostream& os, const TorusGrid& g, SnapshotLayout layout) {
  os.write("PFLD", 4);
  put_u32(os, kSnapshotVersion);
  put_u32(os, static_cast<std::uint32_t>(g.dim()));
  put_u32(os, static_cast<std::uint32_t>(g.modes()));
  put_u32(os, static_cast<std::uint32_t>(layout));
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
  w(os);
  if (!os) throw std::runtime_error("failed writing snapshot: " + path.string());
}

}  // namespace

void write_snapshot(std::ostream& os, const RealVector& u) {
  put_header(os, u.grid(), SnapshotLayout::real);
  for (const auto& c : u) {
    for (double x : c.values()) put_f64(os, x);
  }
}

void write_snapshot(std::ostream& os, const RealField& f) {
  put_header(os, f.grid(), SnapshotLayout::real);
  for (double x : f.values()) put_f64(os, x);
}

void write_snapshot(std::ostream& os, const SpectralVector& u) {
  put_header(os, u.grid(), SnapshotLayout::spectral);
  for (const auto& c : u) {
    for (const auto& z : c.coeffs()) {
      put_f64(os, z.real());
      put_f64(os, z.imag());
    }
  }
}

void write_snapshot(const std::filesystem::path& path, const RealVector& u) {
  write_file(path, [&](std::ostream& os) { write_snapshot(os, u); });
}
void write_snapshot(const std::filesystem::path& path, const SpectralVector& u) {
  write_file(path, [&](std::ostream& os) { write_snapshot(os, u); });
}
void write_snapshot(const std::filesystem::path& path, const RealField& f) {
  write_file(path, [&](std::ostream& os) { write_snapshot(os, f); });
}

Snapshot read_snapshot(std::istream& is) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < kSnapshotHeaderBytes || std::memcmp(bytes.data(), "PFLD", 4) != 0) {
    throw std::runtime_error("snapshot: bad magic");
  }
  Snapshot s;
  s.header.version = get_u32(bytes.data() + 4);
  s.header.dim = get_u32(bytes.data() + 8);
  s.header.modes = get_u32(bytes.data() + 12);
  auto layout = get_u32(bytes.data() + 16);
  if (s.header.version != kSnapshotVersion) {
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(s.header.version));
  }
  if (layout > 1) throw std::runtime_error("snapshot: unknown layout flag " + std::to_string(layout));
  s.header.layout = static_cast<SnapshotLayout>(layout);

  auto grid = TorusGrid::make(static_cast<int>(s.header.dim), static_cast<int>(s.header.modes));
  const std::size_t per_value = s.header.layout == SnapshotLayout::real ? 8 : 16;
  const std::size_t block = grid.size() * per_value;
  const std::size_t payload = bytes.size() - kSnapshotHeaderBytes;
  if (payload == 0 || payload % block != 0) throw std::runtime_error("snapshot: truncated payload");
  const std::size_t ncomp = payload / block;
  if (ncomp != 1 && ncomp != s.header.dim) {
    throw std::runtime_error("snapshot: component count must be 1 or dim");
  }

  const unsigned char* p = bytes.data() + kSnapshotHeaderBytes;
  if (s.header.layout == SnapshotLayout::real) {
    std::vector<RealField> comps;
    for (std::size_t c = 0; c < ncomp; ++c) {
      RealField f(grid);
      for (std::size_t i = 0; i < grid.size(); ++i, p += 8) f[i] = get_f64(p);
      comps.push_back(std::move(f));
    }
    s.field = RealVector(std::move(comps));
  } else {
    std::vector<SpectralField> comps;
    for (std::size_t c = 0; c < ncomp; ++c) {
      SpectralField f(grid);
      for (std::size_t i = 0; i < grid.size(); ++i, p += 16) f[i] = Complex(get_f64(p), get_f64(p + 8));
      comps.push_back(std::move(f));
    }
    s.field = SpectralVector(std::move(comps));
  }
  return s;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path.string());
  return read_snapshot(is);
}

}  // namespace torusns
