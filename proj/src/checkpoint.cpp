#include "delab/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace delab {

namespace {

constexpr char kMagic[8] = {'D', 'E', 'L', 'A', 'B', '0', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw CheckpointError("truncated checkpoint " + path.string());
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const FlowState& s) {
  const auto& g = s.omega.grid();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
    for (double v : {g.box_length, g.dealias_fraction, s.time, s.mean_velocity[0], s.mean_velocity[1]}) put(os, v);
    const auto values = s.omega.to_physical().values();
    os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    os.flush();
    if (!os) throw CheckpointError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw CheckpointError("cannot rename checkpoint into " + path.string());
  }
}

FlowState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw CheckpointError("bad checkpoint magic in " + path.string());
  GridSpec g;
  g.n = static_cast<int>(get<std::uint32_t>(is, path));
  g.box_length = get<double>(is, path);
  g.dealias_fraction = get<double>(is, path);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError("invalid grid in " + path.string() + ": " + e.what());
  }
  FlowState s;
  s.time = get<double>(is, path);
  s.mean_velocity[0] = get<double>(is, path);
  s.mean_velocity[1] = get<double>(is, path);
  std::vector<double> values(g.points());
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double))))
    throw CheckpointError("truncated checkpoint " + path.string());
  if (is.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes in checkpoint " + path.string());
  s.omega = ScalarField::from_values(g, std::move(values));
  return s;
}

}  // namespace delab
