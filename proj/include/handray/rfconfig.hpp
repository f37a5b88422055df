#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "handray/geometry.hpp"

namespace handray {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Positions of all transmit and receive antennas, in meters. Antennas are
/// ideal isotropic points.
class ArrayGeometry {
 public:
  ArrayGeometry() = default;

  /// Throws std::invalid_argument when either list is empty or two antennas lie
  /// within 1e-6 m of each other.
  ArrayGeometry(std::vector<Vec3> tx, std::vector<Vec3> rx);

  const std::vector<Vec3>& tx() const { return tx_; }
  const std::vector<Vec3>& rx() const { return rx_; }
  std::size_t num_tx() const { return tx_.size(); }
  std::size_t num_rx() const { return rx_.size(); }

  /// Largest coordinate span over all antennas.
  double aperture_extent() const;
  Vec3 center() const;

 private:
  std::vector<Vec3> tx_;
  std::vector<Vec3> rx_;
};

/// Square MIMO layout centered on the z axis in the plane z = plane_z.
///
/// Tx elements sit on the two horizontal edges (y = +-side/2, x from -side/2 to
/// +side/2), so the corners are Tx positions. Rx elements sit on the two
/// vertical edges, pushed half a spacing outward (x = +-(side/2 + spacing/2))
/// so that no Rx coincides with a corner Tx. side = (elements_per_side - 1) * spacing.
ArrayGeometry build_square_array(int elements_per_side, double spacing, double plane_z = 0.0);

/// Stepped-frequency CW waveform. Step n has carrier f0 + n * delta_f.
struct Waveform {
  double f0 = 0.0;
  double delta_f = 0.0;
  int n_f = 0;

  double frequency(int n) const { return f0 + n * delta_f; }
  double bandwidth() const { return delta_f * (n_f - 1); }
  double center_frequency() const { return f0 + 0.5 * bandwidth(); }
  /// c / (2 delta_f)
  double unambiguous_range() const { return kSpeedOfLight / (2.0 * delta_f); }

  /// Throws std::invalid_argument unless f0 > 0, delta_f > 0, n_f >= 2.
  void validate() const;
};

Waveform build_waveform(double f_start, double f_stop, int n_f);

struct DerivedMetrics {
  double bandwidth = 0.0;             // Hz
  double range_resolution = 0.0;      // m, c / (2 B)
  double center_wavelength = 0.0;     // m
  double lateral_resolution = 0.0;    // m, lambda_c * standoff / (2 aperture)
};

DerivedMetrics derived_metrics(const Waveform& waveform, double standoff, double aperture);

/// Regular sampling grid for reconstruction. Samples along each axis sit at
/// min + i * voxel for i = 0..count-1 with count = round(span / voxel) + 1, so
/// both bounds are sample positions.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& min, const Vec3& max, const Vec3& voxel);

  const Vec3& min() const { return min_; }
  const Vec3& max() const { return max_; }
  const Vec3& voxel() const { return voxel_; }
  const std::array<int, 3>& counts() const { return counts_; }
  std::size_t size() const {
    return static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];
  }

  double coordinate(int axis, int i) const { return min_[axis] + i * voxel_[axis]; }
  Vec3 center(int ix, int iy, int iz) const {
    return {coordinate(0, ix), coordinate(1, iy), coordinate(2, iz)};
  }
  /// Linear index, x fastest.
  std::size_t index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(counts_[0]) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(counts_[1]) * iz);
  }
  Vec3 center(std::size_t linear) const;

 private:
  Vec3 min_ = Vec3::Zero();
  Vec3 max_ = Vec3::Zero();
  Vec3 voxel_ = Vec3::Ones();
  std::array<int, 3> counts_{1, 1, 1};
};

}  // namespace handray
