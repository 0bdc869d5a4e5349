#include <fstream>

#include "binary_io.hpp"
#include "mhdpinn/errors.hpp"
#include "mhdpinn/reference.hpp"

// MHDC layout, all little-endian:
//   "MHDC" | u32 version | u64 nx, ny, nt | f64 x_min, x_max, y_min, y_max, t_min, t_max
//   | f64 gamma | u64 name_len, name bytes (UTF-8) | f64 payload[nt][ny][nx][8]

namespace mhdpinn {

using namespace detail;

void save_cube(const std::filesystem::path& path, const SolutionCube& cube) {
  cube.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write("MHDC", 4);
  put_u32(os, kCubeFormatVersion);
  put_u64(os, cube.dims.nx);
  put_u64(os, cube.dims.ny);
  put_u64(os, cube.dims.nt);
  const Domain& d = cube.domain;
  for (double v : {d.x_min, d.x_max, d.y_min, d.y_max, d.t_min, d.t_max, cube.gamma}) put_f64(os, v);
  put_string(os, cube.name);
  for (double v : cube.data) put_f64(os, v);
  if (!os) throw FormatError("write failed for " + path.string());
}

SolutionCube load_cube(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open cube file " + path.string());
  const auto file_size = static_cast<std::uint64_t>(std::filesystem::file_size(path));

  char magic[4] = {};
  if (!is.read(magic, 4) || std::string(magic, 4) != "MHDC") throw CubeLoadError("bad magic, not an MHDC file", 0);
  std::uint32_t version = 0;
  if (!get_u32(is, version)) throw CubeLoadError("truncated header", 0);
  if (version != kCubeFormatVersion) {
    throw CubeLoadError("unsupported MHDC version " + std::to_string(version), 0);
  }
  SolutionCube cube;
  Domain& d = cube.domain;
  bool ok = get_u64(is, cube.dims.nx) && get_u64(is, cube.dims.ny) && get_u64(is, cube.dims.nt);
  for (double* v : {&d.x_min, &d.x_max, &d.y_min, &d.y_max, &d.t_min, &d.t_max, &cube.gamma}) {
    ok = ok && get_f64(is, *v);
  }
  std::uint64_t name_len = 0;
  ok = ok && get_u64(is, name_len);
  if (!ok) throw CubeLoadError("truncated header", 0);
  const std::uint64_t header = 4 + 4 + 3 * 8 + 7 * 8 + 8;
  if (name_len > file_size - std::min(file_size, header)) throw CubeLoadError("truncated name", 0);
  cube.name.resize(name_len);
  if (!is.read(cube.name.data(), static_cast<std::streamsize>(name_len))) throw CubeLoadError("truncated name", 0);

  const std::uint64_t values = cube.dims.nx * cube.dims.ny * cube.dims.nt * kNumFields;
  const std::uint64_t payload = file_size - header - name_len;
  if (cube.dims.nx == 0 || cube.dims.ny == 0 || cube.dims.nt == 0 || payload != values * 8) {
    throw CubeLoadError("size mismatch: payload holds " + std::to_string(payload / 8) +
                            " values, dims " + std::to_string(cube.dims.nx) + "x" +
                            std::to_string(cube.dims.ny) + "x" + std::to_string(cube.dims.nt) +
                            " need " + std::to_string(values),
                        std::min(payload / 8, values));
  }
  cube.data.resize(values);
  for (double& v : cube.data) get_f64(is, v);
  if (!is) throw CubeLoadError("truncated payload", 0);
  cube.provenance = "mhdc:" + path.string();
  cube.validate();
  return cube;
}

}  // namespace mhdpinn
