#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildfire/fields.hpp"

namespace wildfire {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File exists but is truncated, has the wrong magic, or an inconsistent header.
class CorruptSnapshotError : public IoError {
 public:
  using IoError::IoError;
};

/// Binary snapshot layout (all little-endian):
///   8 bytes  magic "WFSNAP01"
///   int64    dims
///   uint64   nx, ny
///   float64  dx, time
///   float64  T[nx * ny], then S[nx * ny], row-major
inline constexpr std::array<char, 8> kSnapshotMagic{'W', 'F', 'S', 'N', 'A', 'P', '0', '1'};

std::vector<unsigned char> encode_snapshot(const FireState& state);
FireState decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const FireState& state, const std::filesystem::path& path);
FireState read_snapshot(const std::filesystem::path& path);

/// Plot-friendly export: one row per cell with columns i,j,x,y,T,S.
void write_snapshot_csv(const FireState& state, const std::filesystem::path& path);

}  // namespace wildfire
