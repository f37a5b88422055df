#include "handray/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "handray/parallel.hpp"

namespace handray {

namespace {

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kTwoPi = 6.28318530717958647692;
constexpr std::size_t kVoxelBlock = 1024;

void check_cube(const BasebandCube& cube) {
  if (cube.samples().size() != cube.num_tx() * cube.num_rx() * cube.num_freq() ||
      cube.num_tx() == 0 || cube.num_rx() == 0) {
    throw std::invalid_argument("cube dimensions disagree with its array geometry");
  }
  cube.waveform().validate();
}

// Fills start phasors exp(j k0 R) and per-step rotations exp(j dk R) for one
// antenna set over a voxel block.
void antenna_phasors(const std::vector<Vec3>& antennas, const VoxelGrid& grid, std::size_t first,
                     std::size_t count, double k0, double dk, ComplexMatrix& start,
                     ComplexMatrix& step) {
  start.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(antennas.size()));
  step.resize(start.rows(), start.cols());
  for (std::size_t v = 0; v < count; ++v) {
    const Vec3 p = grid.center(first + v);
    for (std::size_t a = 0; a < antennas.size(); ++a) {
      const double r = (antennas[a] - p).norm();
      start(v, a) = std::polar(1.0, k0 * r);
      step(v, a) = std::polar(1.0, dk * r);
    }
  }
}

}  // namespace

std::vector<float> Volume::magnitudes() const {
  std::vector<float> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](const Complex& c) { return static_cast<float>(std::abs(c)); });
  return out;
}

Volume backproject(const BasebandCube& cube, const VoxelGrid& grid, unsigned threads) {
  check_cube(cube);
  const auto n_tx = static_cast<Eigen::Index>(cube.num_tx());
  const auto n_rx = static_cast<Eigen::Index>(cube.num_rx());
  const auto n_f = cube.num_freq();
  const double k0 = kTwoPi * cube.waveform().f0 / kSpeedOfLight;
  const double dk = kTwoPi * cube.waveform().delta_f / kSpeedOfLight;

  // Frequency slices transposed to (rx, tx).
  std::vector<ComplexMatrix> slices(n_f, ComplexMatrix(n_rx, n_tx));
  for (Eigen::Index tx = 0; tx < n_tx; ++tx) {
    for (Eigen::Index rx = 0; rx < n_rx; ++rx) {
      const auto chan = cube.channel(static_cast<std::size_t>(tx), static_cast<std::size_t>(rx));
      for (std::size_t n = 0; n < n_f; ++n) slices[n](rx, tx) = chan[n];
    }
  }

  Volume volume{grid, std::vector<Complex>(grid.size())};
  const std::size_t n_blocks = (grid.size() + kVoxelBlock - 1) / kVoxelBlock;
  parallel_for(n_blocks, threads, [&](std::size_t block) {
    const std::size_t first = block * kVoxelBlock;
    const std::size_t count = std::min(kVoxelBlock, grid.size() - first);
    ComplexMatrix rx_phase, rx_step, tx_phase, tx_step;
    antenna_phasors(cube.array().rx(), grid, first, count, k0, dk, rx_phase, rx_step);
    antenna_phasors(cube.array().tx(), grid, first, count, k0, dk, tx_phase, tx_step);

    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(count));
    ComplexMatrix partial(static_cast<Eigen::Index>(count), n_tx);
    for (std::size_t n = 0; n < n_f; ++n) {
      partial.noalias() = rx_phase * slices[n];
      acc += partial.cwiseProduct(tx_phase).rowwise().sum();
      if (n + 1 < n_f) {
        rx_phase = rx_phase.cwiseProduct(rx_step);
        tx_phase = tx_phase.cwiseProduct(tx_step);
      }
    }
    std::copy(acc.data(), acc.data() + count, volume.values.begin() + static_cast<long>(first));
  });
  return volume;
}

Volume backproject_reference(const BasebandCube& cube, const VoxelGrid& grid) {
  check_cube(cube);
  const auto& array = cube.array();
  const auto& w = cube.waveform();
  Volume volume{grid, std::vector<Complex>(grid.size())};
  for (int iz = 0; iz < grid.counts()[2]; ++iz) {
    for (int iy = 0; iy < grid.counts()[1]; ++iy) {
      for (int ix = 0; ix < grid.counts()[0]; ++ix) {
        const Vec3 v = grid.center(ix, iy, iz);
        Complex sum{};
        for (std::size_t tx = 0; tx < cube.num_tx(); ++tx) {
          for (std::size_t rx = 0; rx < cube.num_rx(); ++rx) {
            const double path = (array.tx()[tx] - v).norm() + (array.rx()[rx] - v).norm();
            for (int n = 0; n < w.n_f; ++n) {
              const double phase = kTwoPi * w.frequency(n) * path / kSpeedOfLight;
              sum += cube.at(tx, rx, static_cast<std::size_t>(n)) * std::polar(1.0, phase);
            }
          }
        }
        volume.values[grid.index(ix, iy, iz)] = sum;
      }
    }
  }
  return volume;
}

RadarImage max_project(const Volume& volume) {
  const auto& g = volume.grid;
  if (volume.values.size() != g.size() || g.size() == 0) {
    throw std::invalid_argument("volume value count does not match its grid");
  }
  RadarImage image;
  image.nx = g.counts()[0];
  image.ny = g.counts()[1];
  image.x0 = g.min().x();
  image.y0 = g.min().y();
  image.dx = g.voxel().x();
  image.dy = g.voxel().y();
  image.amplitude.assign(static_cast<std::size_t>(image.nx) * image.ny, 0.0);
  image.depth_z.assign(image.amplitude.size(), g.coordinate(2, 0));
  std::vector<double> best(image.amplitude.size(), -1.0);
  for (int iz = 0; iz < g.counts()[2]; ++iz) {
    const double z = g.coordinate(2, iz);
    for (int iy = 0; iy < image.ny; ++iy) {
      for (int ix = 0; ix < image.nx; ++ix) {
        const double m = std::abs(volume.values[g.index(ix, iy, iz)]);
        const auto p = image.index(ix, iy);
        if (m > best[p]) {
          best[p] = m;
          image.amplitude[p] = m;
          image.depth_z[p] = z;
        }
      }
    }
  }
  return image;
}

RadarImage finalize_image(RadarImage image, double floor_db) {
  if (std::isnan(floor_db) || floor_db >= 0.0) {
    throw std::invalid_argument("dynamic-range floor must be negative (dB)");
  }
  const double peak =
      image.amplitude.empty() ? 0.0 : *std::max_element(image.amplitude.begin(), image.amplitude.end());
  if (!(peak > 0.0)) throw std::domain_error("cannot normalize an all-zero image");
  const double floor_linear = std::isinf(floor_db) ? 0.0 : std::pow(10.0, floor_db / 20.0);
  for (auto& a : image.amplitude) {
    a /= peak;
    if (a < floor_linear) a = floor_linear;
  }
  image.floor_db = floor_db;
  return image;
}

}  // namespace handray
