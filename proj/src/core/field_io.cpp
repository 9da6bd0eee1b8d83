#include "nclb/core/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace nclb {

static_assert(std::endian::native == std::endian::little, "field format assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'C', 'L', 'B', 'F', 'L', 'D', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ConfigError("read_field: truncated header or payload");
  return v;
}

}  // namespace

void write_field(std::ostream& out, const PhaseFieldd& f) {
  out.write(kMagic.data(), kMagic.size());
  const bool hom = f.x_grid().is_homogeneous();
  put<std::int32_t>(out, f.n_x());
  put<std::int32_t>(out, hom ? 1 : 0);
  put<std::int32_t>(out, f.v_grid().n());
  put<std::int32_t>(out, 0);
  put<double>(out, hom ? 0.0 : f.x_grid().length());
  put<double>(out, f.v_grid().extent());
  put<double>(out, f.time());
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
}

PhaseFieldd read_field(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("read_field: bad magic");
  const auto nx = get<std::int32_t>(in);
  const auto hom = get<std::int32_t>(in);
  const auto n = get<std::int32_t>(in);
  (void)get<std::int32_t>(in);
  const double lx = get<double>(in);
  const double lv = get<double>(in);
  const double t = get<double>(in);
  const auto xg = hom ? SpaceGrid<double>::homogeneous() : SpaceGrid<double>::periodic(lx, nx);
  PhaseFieldd f(xg, VelocityGrid<double>(lv, n), t);
  in.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!in) throw ConfigError("read_field: truncated payload");
  return f;
}

void save_field(const std::string& path, const PhaseFieldd& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("save_field: cannot open " + path);
  write_field(out, f);
}

PhaseFieldd load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("load_field: cannot open " + path);
  return read_field(in);
}

void write_field_csv(std::ostream& out, const PhaseFieldd& f) {
  out << "x,vx,vy,vz,f\n" << std::setprecision(17);
  for (int ix = 0; ix < f.n_x(); ++ix)
    for (std::size_t iv = 0; iv < f.block_size(); ++iv) {
      const Vec3d v = f.v_grid().node(iv);
      out << f.x_grid().coord(ix) << ',' << v[0] << ',' << v[1] << ',' << v[2] << ',' << f(ix, iv) << '\n';
    }
}

}  // namespace nclb
