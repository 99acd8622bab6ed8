#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "subrh/fields.hpp"

namespace subrh {

/// Binary map snapshot.
///
/// Layout (all integers little-endian):
///   offset 0   8 bytes  magic "SUBRHMAP"
///   offset 8   uint32   format version (1)
///   offset 12  uint32   grid size N
///   offset 16  uint32   number of components K
///   offset 20  uint32   bytes per value (8)
///   offset 24  K·N³ IEEE-754 binary64 values, little-endian, component-major,
///              each component in (i, j, k) order with k fastest.
/// A JSON sidecar `<path>.json` carries {time, scenario, seed, grid_n, k}.
inline constexpr char kSnapshotMagic[8] = {'S', 'U', 'B', 'R', 'H', 'M', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 24;

struct SnapshotMeta {
  double time = 0.0;
  std::string scenario;
  std::uint64_t seed = 0;
};

class SnapshotError : public std::runtime_error {
 public:
  enum class Kind { Io, HeaderMismatch, Truncated };
  SnapshotError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::size_t snapshot_file_size(int grid_n, int k);

void write_snapshot(const MapField& u, const std::filesystem::path& path, const SnapshotMeta& meta = {});

struct Snapshot {
  MapField field;
  SnapshotMeta meta;
};

/// Reads the binary payload; the sidecar is read when present.
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace subrh
