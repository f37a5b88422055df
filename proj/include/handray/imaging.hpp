#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "handray/baseband.hpp"
#include "handray/rfconfig.hpp"

namespace handray {

/// Complex reconstruction on a voxel grid, x fastest.
struct Volume {
  VoxelGrid grid;
  std::vector<Complex> values;

  double magnitude(int ix, int iy, int iz) const { return std::abs(values[grid.index(ix, iy, iz)]); }
  std::vector<float> magnitudes() const;
};

/// 2D reduction of a volume over z, x fastest.
struct RadarImage {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0, y0 = 0.0;  // coordinate of pixel (0, 0)
  double dx = 0.0, dy = 0.0;
  std::vector<double> amplitude;
  std::vector<double> depth_z;  // meters
  /// Clipping floor in dB; -inf until finalize_image applies one.
  double floor_db = -std::numeric_limits<double>::infinity();

  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx + ix; }
};

/// Matched-filter back-projection:
///   value(v) = sum_tx sum_rx sum_n s[tx, rx, n] exp(+j 2 pi f_n (|p_tx - v| + |p_rx - v|) / c)
///
/// Evaluated per frequency as a matrix product over fixed voxel blocks: Rx
/// phasors (voxels x Rx) times the transposed frequency slice (Rx x Tx),
/// contracted with the Tx phasors. Per-step phasors are advanced by complex
/// multiplication instead of fresh sin/cos. Output is identical for any
/// thread count.
Volume backproject(const BasebandCube& cube, const VoxelGrid& grid, unsigned threads = 0);

/// Direct evaluation of the same sum with one exp per (voxel, tx, rx, n).
Volume backproject_reference(const BasebandCube& cube, const VoxelGrid& grid);

/// amplitude(x, y) = max_z |value|; depth_z = z of that voxel, ties to the smallest z.
RadarImage max_project(const Volume& volume);

/// Normalizes to the global maximum, then clamps values below floor_db (dB,
/// amplitude scale 20 log10) to 10^(floor_db / 20). floor_db = -inf disables
/// clamping. Throws std::invalid_argument for floor_db >= 0 or NaN, and
/// std::domain_error for an all-zero image.
RadarImage finalize_image(RadarImage image, double floor_db);

/// Volume file: f64 min[3], max[3], voxel[3]; u32 counts[3]; f32 magnitudes,
/// x fastest. Little-endian.
void write_volume(std::ostream& out, const Volume& volume);

struct VolumeFile {
  VoxelGrid grid;
  std::vector<float> magnitudes;
};
VolumeFile read_volume(std::istream& in);

/// Same header followed by interleaved f64 real/imag values.
void write_volume_complex(std::ostream& out, const Volume& volume);

void save_volume(const std::filesystem::path& path, const Volume& volume);

/// 16-bit binary PGM (maxval 65535) with values mapped linearly from [lo, hi].
/// Rows run from the largest y down so +y points up. A sidecar `<path>.txt`
/// records lo, hi, and the pixel grid.
void write_pgm16(const std::filesystem::path& path, const RadarImage& image,
                 const std::vector<double>& values, double lo, double hi);

/// Writes amplitude.pgm, depth.pgm (plus sidecars) and optionally image.csv
/// into `directory`. Returns the written paths.
std::vector<std::filesystem::path> export_image(const std::filesystem::path& directory,
                                                const RadarImage& image, bool csv);

}  // namespace handray
