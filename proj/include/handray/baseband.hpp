#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "handray/rfconfig.hpp"
#include "handray/tracer.hpp"

namespace handray {

using Complex = std::complex<double>;

/// Per-ray amplitude applied during synthesis. Unit amplitude reproduces the
/// plain coherent phasor sum; inverse-distance adds spherical spreading.
enum class AmplitudeModel { kUnit, kInverseDistance };

/// Complex SFCW baseband samples indexed (tx, rx, n), n fastest.
class BasebandCube {
 public:
  BasebandCube() = default;
  BasebandCube(Waveform waveform, ArrayGeometry array);

  const Waveform& waveform() const { return waveform_; }
  const ArrayGeometry& array() const { return array_; }
  std::size_t num_tx() const { return array_.num_tx(); }
  std::size_t num_rx() const { return array_.num_rx(); }
  std::size_t num_freq() const { return static_cast<std::size_t>(waveform_.n_f); }

  std::size_t index(std::size_t tx, std::size_t rx, std::size_t n) const {
    return (tx * num_rx() + rx) * num_freq() + n;
  }
  Complex& at(std::size_t tx, std::size_t rx, std::size_t n) { return samples_[index(tx, rx, n)]; }
  const Complex& at(std::size_t tx, std::size_t rx, std::size_t n) const {
    return samples_[index(tx, rx, n)];
  }
  std::span<Complex> channel(std::size_t tx, std::size_t rx) {
    return {samples_.data() + index(tx, rx, 0), num_freq()};
  }
  std::span<const Complex> channel(std::size_t tx, std::size_t rx) const {
    return {samples_.data() + index(tx, rx, 0), num_freq()};
  }

  std::vector<Complex>& samples() { return samples_; }
  const std::vector<Complex>& samples() const { return samples_; }

 private:
  Waveform waveform_;
  ArrayGeometry array_;
  std::vector<Complex> samples_;
};

/// s[n] = sum_i a(d_i) exp(-j 2 pi (f0 + n delta_f) d_i / c), accumulated in
/// ascending path length. Throws std::invalid_argument for non-positive or
/// non-finite lengths.
std::vector<Complex> synthesize_channel(std::span<const PathRecord> records,
                                        const Waveform& waveform,
                                        AmplitudeModel amplitude = AmplitudeModel::kUnit);

/// Builds the full cube; channels without records stay zero.
BasebandCube synthesize_cube(std::span<const PathRecord> records, const Waveform& waveform,
                             const ArrayGeometry& array,
                             AmplitudeModel amplitude = AmplitudeModel::kUnit,
                             unsigned threads = 0);

/// Adds circular complex white Gaussian noise of total power `power` per sample.
void add_noise(BasebandCube& cube, double power, std::uint64_t seed);

/// Cube file: "SFCWCUBE", u32 n_tx, n_rx, n_f, f64 f0, delta_f, then
/// interleaved f64 real/imag samples, tx slowest and n fastest. Little-endian.
void write_cube(std::ostream& out, const BasebandCube& cube);

/// Reads a cube written by write_cube. Antenna positions are not stored in the
/// file, so the caller supplies the array; counts must match it.
BasebandCube read_cube(std::istream& in, const ArrayGeometry& array);

void save_cube(const std::filesystem::path& path, const BasebandCube& cube);
BasebandCube load_cube(const std::filesystem::path& path, const ArrayGeometry& array);

}  // namespace handray
