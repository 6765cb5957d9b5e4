#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hylomorph/lattice.hpp"

namespace hylo {

enum class SnapshotKind : std::uint8_t { RealField = 0, ComplexField = 1, NkgPair = 2 };

/// Binary field dump, little-endian:
///   "HYLO" | u32 version = 1 | u8 kind | u8 dim | u64 points per direction
///   | dim*dim f64 lattice matrix (row-major) | f64 payload
/// Complex payloads interleave (re, im); an NKG pair stores psi then psi_dot.
struct Snapshot {
  SnapshotKind kind = SnapshotKind::ComplexField;
  int dim = 1;
  std::vector<std::uint64_t> counts;
  std::vector<double> lattice;
  std::vector<Complex> psi;
  std::vector<Complex> psi_dot;  // NkgPair only
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

Snapshot make_snapshot(const Field& field);
/// Drops imaginary parts; throws std::invalid_argument if any is nonzero.
Snapshot make_real_snapshot(const Field& field);
Snapshot make_snapshot(const NkgState& state);

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
/// Throws FormatError carrying the byte offset of the first problem.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

/// Writes to a temporary file and renames it into place.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Rebuild on `grid`; throws GridMismatch when sizes or lattice differ.
/// Real and complex snapshots give a Field, pairs give an NkgState.
Field snapshot_field(const Snapshot& snap, const Grid& grid);
NkgState snapshot_state(const Snapshot& snap, const Grid& grid);

/// Temporary file next to `path`, then rename.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace hylo
