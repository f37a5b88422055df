#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "handray/binary_io.hpp"
#include "handray/imaging.hpp"

namespace handray {

namespace {

void write_grid_header(std::ostream& out, const VoxelGrid& g) {
  for (const Vec3* v : {&g.min(), &g.max(), &g.voxel()}) {
    for (int a = 0; a < 3; ++a) binary::put<double>(out, (*v)[a]);
  }
  for (int a = 0; a < 3; ++a) binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.counts()[a]));
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_volume(std::ostream& out, const Volume& volume) {
  write_grid_header(out, volume.grid);
  for (float m : volume.magnitudes()) binary::put<float>(out, m);
}

void write_volume_complex(std::ostream& out, const Volume& volume) {
  write_grid_header(out, volume.grid);
  for (const auto& c : volume.values) {
    binary::put<double>(out, c.real());
    binary::put<double>(out, c.imag());
  }
}

VolumeFile read_volume(std::istream& in) {
  Vec3 corner[3];
  for (auto& v : corner) {
    for (int a = 0; a < 3; ++a) v[a] = binary::get<double>(in);
  }
  std::uint32_t counts[3];
  for (auto& c : counts) c = binary::get<std::uint32_t>(in);
  VolumeFile file{VoxelGrid(corner[0], corner[1], corner[2]), {}};
  for (int a = 0; a < 3; ++a) {
    if (static_cast<int>(counts[a]) != file.grid.counts()[a]) {
      throw std::runtime_error("volume header counts disagree with its grid bounds");
    }
  }
  file.magnitudes.resize(file.grid.size());
  for (auto& m : file.magnitudes) m = binary::get<float>(in);
  return file;
}

void save_volume(const std::filesystem::path& path, const Volume& volume) {
  auto out = open_out(path, std::ios::binary);
  write_volume(out, volume);
}

void write_pgm16(const std::filesystem::path& path, const RadarImage& image,
                 const std::vector<double>& values, double lo, double hi) {
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << image.nx << ' ' << image.ny << "\n65535\n";
  const double span = hi > lo ? hi - lo : 1.0;
  for (int iy = image.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < image.nx; ++ix) {
      const double t = std::clamp((values[image.index(ix, iy)] - lo) / span, 0.0, 1.0);
      const auto level = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      // PGM samples are big-endian.
      out.put(static_cast<char>(level >> 8));
      out.put(static_cast<char>(level & 0xff));
    }
  }
  auto side = open_out(path.string() + ".txt", std::ios::out);
  side << std::setprecision(17);
  side << "min " << lo << "\nmax " << hi << "\n";
  side << "nx " << image.nx << "\nny " << image.ny << "\n";
  side << "x0 " << image.x0 << "\ny0 " << image.y0 << "\ndx " << image.dx << "\ndy " << image.dy << "\n";
  side << "floor_db " << image.floor_db << "\n";
  side << "rows top-to-bottom from y = y0 + (ny - 1) * dy\n";
}

std::vector<std::filesystem::path> export_image(const std::filesystem::path& directory,
                                                const RadarImage& image, bool csv) {
  std::vector<std::filesystem::path> written;
  const double amp_lo = std::isinf(image.floor_db) ? 0.0 : std::pow(10.0, image.floor_db / 20.0);
  const auto amp = directory / "amplitude.pgm";
  write_pgm16(amp, image, image.amplitude, amp_lo, 1.0);
  written.push_back(amp);
  written.emplace_back(amp.string() + ".txt");

  const auto [zmin, zmax] = std::minmax_element(image.depth_z.begin(), image.depth_z.end());
  const auto depth = directory / "depth.pgm";
  write_pgm16(depth, image, image.depth_z, *zmin, *zmax);
  written.push_back(depth);
  written.emplace_back(depth.string() + ".txt");

  if (csv) {
    const auto path = directory / "image.csv";
    auto out = open_out(path, std::ios::out);
    out << std::setprecision(17) << "x,y,amplitude,depth_z\n";
    for (int iy = 0; iy < image.ny; ++iy) {
      for (int ix = 0; ix < image.nx; ++ix) {
        const auto p = image.index(ix, iy);
        out << image.x0 + ix * image.dx << ',' << image.y0 + iy * image.dy << ','
            << image.amplitude[p] << ',' << image.depth_z[p] << '\n';
      }
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace handray
