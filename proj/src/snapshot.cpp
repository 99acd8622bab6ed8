#include "subrh/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace subrh {

namespace {

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::vector<unsigned char>& buf, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

std::size_t snapshot_file_size(int grid_n, int k) {
  const auto n = static_cast<std::size_t>(grid_n);
  return kSnapshotHeaderBytes + static_cast<std::size_t>(k) * n * n * n * 8;
}

void write_snapshot(const MapField& u, const std::filesystem::path& path, const SnapshotMeta& meta) {
  std::vector<unsigned char> buf;
  buf.reserve(snapshot_file_size(u.grid().n(), u.k()));
  buf.insert(buf.end(), std::begin(kSnapshotMagic), std::end(kSnapshotMagic));
  put_u32(buf, kSnapshotVersion);
  put_u32(buf, static_cast<std::uint32_t>(u.grid().n()));
  put_u32(buf, static_cast<std::uint32_t>(u.k()));
  put_u32(buf, 8);
  for (int a = 0; a < u.k(); ++a)
    for (double v : u[a].data()) put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError(SnapshotError::Kind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw SnapshotError(SnapshotError::Kind::Io, "write failed for " + path.string());

  const nlohmann::ordered_json side = {{"time", meta.time},
                                       {"scenario", meta.scenario},
                                       {"seed", meta.seed},
                                       {"grid_n", u.grid().n()},
                                       {"k", u.k()}};
  std::ofstream js(sidecar_path(path), std::ios::trunc);
  if (!js) throw SnapshotError(SnapshotError::Kind::Io, "cannot write sidecar for " + path.string());
  js << side.dump(2) << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError(SnapshotError::Kind::Io, "cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw SnapshotError(SnapshotError::Kind::Io, "read failed for " + path.string());

  if (buf.size() < kSnapshotHeaderBytes)
    throw SnapshotError(SnapshotError::Kind::Truncated, "file shorter than snapshot header");
  if (std::memcmp(buf.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) != 0)
    throw SnapshotError(SnapshotError::Kind::HeaderMismatch, "bad snapshot magic");
  const std::uint32_t version = get_u32(buf.data() + 8);
  const std::uint32_t n = get_u32(buf.data() + 12);
  const std::uint32_t k = get_u32(buf.data() + 16);
  const std::uint32_t width = get_u32(buf.data() + 20);
  if (version != kSnapshotVersion)
    throw SnapshotError(SnapshotError::Kind::HeaderMismatch, "unsupported snapshot version " + std::to_string(version));
  if (width != 8 || n < 8 || n > 4096 || k < 1 || k > 64)
    throw SnapshotError(SnapshotError::Kind::HeaderMismatch, "inconsistent snapshot header");

  const std::size_t expected = snapshot_file_size(static_cast<int>(n), static_cast<int>(k));
  if (buf.size() < expected)
    throw SnapshotError(SnapshotError::Kind::Truncated,
                        "payload truncated: " + std::to_string(buf.size()) + " of " + std::to_string(expected) + " bytes");
  if (buf.size() > expected) throw SnapshotError(SnapshotError::Kind::HeaderMismatch, "trailing bytes after payload");

  const Grid grid(static_cast<int>(n));
  MapField u(grid, static_cast<int>(k));
  const unsigned char* p = buf.data() + kSnapshotHeaderBytes;
  for (int a = 0; a < u.k(); ++a)
    for (double& v : u[a].data()) {
      v = get_f64(p);
      p += 8;
    }

  SnapshotMeta meta;
  if (std::ifstream js(sidecar_path(path)); js) {
    try {
      const auto side = nlohmann::json::parse(js);
      meta.time = side.value("time", 0.0);
      meta.scenario = side.value("scenario", std::string{});
      meta.seed = side.value("seed", std::uint64_t{0});
      if (side.value("grid_n", 0) != static_cast<int>(n) || side.value("k", 0) != static_cast<int>(k))
        throw SnapshotError(SnapshotError::Kind::HeaderMismatch, "sidecar disagrees with binary header");
    } catch (const nlohmann::json::exception& e) {
      throw SnapshotError(SnapshotError::Kind::HeaderMismatch, std::string("bad sidecar: ") + e.what());
    }
  }
  return Snapshot{std::move(u), std::move(meta)};
}

}  // namespace subrh
