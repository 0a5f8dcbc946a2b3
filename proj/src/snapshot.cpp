#include "wildfire/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>

namespace wildfire {

namespace {

constexpr std::size_t kHeaderBytes = 8 + 5 * 8;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace

std::vector<unsigned char> encode_snapshot(const FireState& state) {
  state.check_conforming();
  const auto& g = state.grid;
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + 16 * g.cells());
  for (char c : kSnapshotMagic) out.push_back(static_cast<unsigned char>(c));
  put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(g.dims)));
  put_u64(out, g.nx);
  put_u64(out, g.ny);
  put_f64(out, g.dx);
  put_f64(out, state.time);
  for (double v : state.T) put_f64(out, v);
  for (double v : state.S) put_f64(out, v);
  return out;
}

FireState decode_snapshot(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes) throw CorruptSnapshotError("snapshot truncated inside header");
  if (!std::equal(kSnapshotMagic.begin(), kSnapshotMagic.end(), bytes.begin()))
    throw CorruptSnapshotError("snapshot magic number mismatch");
  const unsigned char* p = bytes.data() + 8;
  Grid g;
  g.dims = static_cast<int>(static_cast<std::int64_t>(get_u64(p)));
  g.nx = get_u64(p + 8);
  g.ny = get_u64(p + 16);
  g.dx = get_f64(p + 24);
  const double time = get_f64(p + 32);
  try {
    g.validate();
  } catch (const ShapeError& e) {
    throw CorruptSnapshotError(std::string("snapshot header: ") + e.what());
  }
  if (g.nx > (bytes.size() / 16) || g.ny > (bytes.size() / 16))
    throw CorruptSnapshotError("snapshot header declares more cells than the file holds");
  const std::size_t cells = g.cells();
  const std::size_t expected = kHeaderBytes + 16 * cells;
  if (bytes.size() < expected) throw CorruptSnapshotError("snapshot truncated: field data incomplete");
  if (bytes.size() > expected) throw CorruptSnapshotError("snapshot has trailing bytes after field data");

  FireState s;
  s.grid = g;
  s.time = time;
  s.T.resize(cells);
  s.S.resize(cells);
  const unsigned char* data = bytes.data() + kHeaderBytes;
  for (std::size_t k = 0; k < cells; ++k) s.T[k] = get_f64(data + 8 * k);
  for (std::size_t k = 0; k < cells; ++k) s.S[k] = get_f64(data + 8 * (cells + k));
  return s;
}

void write_snapshot(const FireState& state, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(state);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

FireState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

void write_snapshot_csv(const FireState& state, const std::filesystem::path& path) {
  state.check_conforming();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto& g = state.grid;
  out << "i,j,x,y,T,S\n" << std::setprecision(17);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const auto p = g.index(i, j);
      out << i << ',' << j << ',' << g.x(i) << ',' << g.y(j) << ',' << state.T[p] << ',' << state.S[p]
          << '\n';
    }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace wildfire
