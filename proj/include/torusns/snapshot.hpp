#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>

#include "torusns/field.hpp"

namespace torusns {

// PFLD binary snapshot:
//   bytes 0..3   "PFLD"
//   u32 version (1), u32 dim, u32 M, u32 layout (0 = real, 1 = spectral)
//   payload: component blocks, each M^dim little-endian f64 values in row-major
//   axis order (spectral: interleaved re, im). The component count is
//   payload_bytes / (M^dim * 8 * (1 or 2)) and must be 1 or dim.

inline constexpr std::uint32_t kSnapshotVersion = 1;

enum class SnapshotLayout : std::uint32_t { real = 0, spectral = 1 };

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint32_t dim = 0;
  std::uint32_t modes = 0;
  SnapshotLayout layout = SnapshotLayout::real;
};

inline constexpr std::size_t kSnapshotHeaderBytes = 20;

void write_snapshot(std::ostream& os, const RealVector& u);
void write_snapshot(std::ostream& os, const SpectralVector& u);
void write_snapshot(std::ostream& os, const RealField& f);
void write_snapshot(const std::filesystem::path& path, const RealVector& u);
void write_snapshot(const std::filesystem::path& path, const SpectralVector& u);
void write_snapshot(const std::filesystem::path& path, const RealField& f);

struct Snapshot {
  SnapshotHeader header;
  std::variant<RealVector, SpectralVector> field;
};

/// Throws std::runtime_error on bad magic, unknown version/layout or truncated payload.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace torusns
