#include "handray/rfconfig.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace handray {

namespace {

constexpr double kMinAntennaSeparation = 1e-6;

}  // namespace

ArrayGeometry::ArrayGeometry(std::vector<Vec3> tx, std::vector<Vec3> rx)
    : tx_(std::move(tx)), rx_(std::move(rx)) {
  if (tx_.empty() || rx_.empty()) throw std::invalid_argument("array needs at least one Tx and one Rx");
  std::vector<const Vec3*> all;
  for (const auto& p : tx_) all.push_back(&p);
  for (const auto& p : rx_) all.push_back(&p);
  for (const auto* p : all) {
    if (!p->allFinite()) throw std::invalid_argument("antenna position is not finite");
  }
  // O(n^2) is fine for a few hundred antennas.
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if ((*all[i] - *all[j]).norm() <= kMinAntennaSeparation) {
        throw std::invalid_argument("antennas " + std::to_string(i) + " and " + std::to_string(j) +
                                    " coincide (Tx listed first, then Rx)");
      }
    }
  }
}

double ArrayGeometry::aperture_extent() const {
  Eigen::AlignedBox3d box;
  for (const auto& p : tx_) box.extend(p);
  for (const auto& p : rx_) box.extend(p);
  return box.sizes().maxCoeff();
}

Vec3 ArrayGeometry::center() const {
  Eigen::AlignedBox3d box;
  for (const auto& p : tx_) box.extend(p);
  for (const auto& p : rx_) box.extend(p);
  return box.center();
}

ArrayGeometry build_square_array(int elements_per_side, double spacing, double plane_z) {
  if (elements_per_side < 2) throw std::invalid_argument("elements_per_side must be >= 2");
  if (!(spacing > 0.0)) throw std::invalid_argument("antenna spacing must be positive");
  const double half = 0.5 * (elements_per_side - 1) * spacing;
  const double rx_x = half + 0.5 * spacing;
  std::vector<Vec3> tx;
  std::vector<Vec3> rx;
  tx.reserve(2 * elements_per_side);
  rx.reserve(2 * elements_per_side);
  for (double y : {half, -half}) {
    for (int i = 0; i < elements_per_side; ++i) tx.emplace_back(-half + i * spacing, y, plane_z);
  }
  for (double x : {-rx_x, rx_x}) {
    for (int i = 0; i < elements_per_side; ++i) rx.emplace_back(x, -half + i * spacing, plane_z);
  }
  return ArrayGeometry(std::move(tx), std::move(rx));
}

void Waveform::validate() const {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw std::invalid_argument("waveform f0 must be positive");
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw std::invalid_argument("waveform delta_f must be positive");
  }
  if (n_f < 2) throw std::invalid_argument("waveform needs at least 2 frequency steps");
}

Waveform build_waveform(double f_start, double f_stop, int n_f) {
  if (!(f_stop > f_start)) throw std::invalid_argument("f_stop must exceed f_start");
  if (n_f < 2) throw std::invalid_argument("n_f must be >= 2");
  Waveform w{f_start, (f_stop - f_start) / (n_f - 1), n_f};
  w.validate();
  return w;
}

DerivedMetrics derived_metrics(const Waveform& waveform, double standoff, double aperture) {
  waveform.validate();
  if (!(standoff > 0.0) || !(aperture > 0.0)) {
    throw std::invalid_argument("standoff and aperture must be positive");
  }
  DerivedMetrics m;
  m.bandwidth = waveform.bandwidth();
  m.range_resolution = kSpeedOfLight / (2.0 * m.bandwidth);
  m.center_wavelength = kSpeedOfLight / waveform.center_frequency();
  m.lateral_resolution = m.center_wavelength * standoff / (2.0 * aperture);
  return m;
}

VoxelGrid::VoxelGrid(const Vec3& min, const Vec3& max, const Vec3& voxel)
    : min_(min), max_(max), voxel_(voxel) {
  for (int a = 0; a < 3; ++a) {
    if (!(max_[a] > min_[a])) throw std::invalid_argument("grid max must exceed min on every axis");
    if (!(voxel_[a] > 0.0)) throw std::invalid_argument("voxel edge must be positive");
    const double steps = std::round((max_[a] - min_[a]) / voxel_[a]);
    if (steps > 1e6) throw std::invalid_argument("grid too large");
    counts_[a] = static_cast<int>(steps) + 1;
  }
}

Vec3 VoxelGrid::center(std::size_t linear) const {
  const auto nx = static_cast<std::size_t>(counts_[0]);
  const auto ny = static_cast<std::size_t>(counts_[1]);
  const int ix = static_cast<int>(linear % nx);
  const int iy = static_cast<int>((linear / nx) % ny);
  const int iz = static_cast<int>(linear / (nx * ny));
  return center(ix, iy, iz);
}

}  // namespace handray
