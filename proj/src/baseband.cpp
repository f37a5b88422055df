#include "handray/baseband.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "handray/binary_io.hpp"
#include "handray/parallel.hpp"
#include "handray/rng.hpp"

namespace handray {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr char kCubeMagic[8] = {'S', 'F', 'C', 'W', 'C', 'U', 'B', 'E'};

void check_length(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("path length must be positive and finite");
  }
}

// Adds one channel's records (already in accumulation order) into `out`.
void accumulate(std::span<const PathRecord> sorted, const Waveform& waveform,
                AmplitudeModel amplitude, std::span<Complex> out) {
  for (const auto& r : sorted) {
    const double weight = amplitude == AmplitudeModel::kInverseDistance ? 1.0 / r.length_d : 1.0;
    for (int n = 0; n < waveform.n_f; ++n) {
      const double phase = -kTwoPi * waveform.frequency(n) * r.length_d / kSpeedOfLight;
      out[n] += std::polar(weight, phase);
    }
  }
}

}  // namespace

BasebandCube::BasebandCube(Waveform waveform, ArrayGeometry array)
    : waveform_(waveform), array_(std::move(array)) {
  waveform_.validate();
  samples_.assign(num_tx() * num_rx() * num_freq(), Complex{});
}

std::vector<Complex> synthesize_channel(std::span<const PathRecord> records,
                                        const Waveform& waveform, AmplitudeModel amplitude) {
  waveform.validate();
  for (const auto& r : records) check_length(r.length_d);
  std::vector<PathRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PathRecord& a, const PathRecord& b) { return a.length_d < b.length_d; });
  std::vector<Complex> out(static_cast<std::size_t>(waveform.n_f));
  accumulate(sorted, waveform, amplitude, out);
  return out;
}

BasebandCube synthesize_cube(std::span<const PathRecord> records, const Waveform& waveform,
                             const ArrayGeometry& array, AmplitudeModel amplitude,
                             unsigned threads) {
  BasebandCube cube(waveform, array);
  for (const auto& r : records) {
    if (r.tx >= array.num_tx() || r.rx >= array.num_rx()) {
      throw std::out_of_range("path record references antenna outside the array");
    }
    check_length(r.length_d);
  }
  std::vector<PathRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), record_less);

  // Channel boundaries in the sorted list.
  const std::size_t n_channels = array.num_tx() * array.num_rx();
  std::vector<std::size_t> begin(n_channels + 1, sorted.size());
  for (std::size_t i = sorted.size(); i-- > 0;) {
    begin[sorted[i].tx * array.num_rx() + sorted[i].rx] = i;
  }
  for (std::size_t c = n_channels; c-- > 0;) begin[c] = std::min(begin[c], begin[c + 1]);

  parallel_for(n_channels, threads, [&](std::size_t c) {
    const std::span<const PathRecord> chan(sorted.data() + begin[c], begin[c + 1] - begin[c]);
    accumulate(chan, waveform, amplitude, cube.channel(c / array.num_rx(), c % array.num_rx()));
  });
  return cube;
}

void add_noise(BasebandCube& cube, double power, std::uint64_t seed) {
  if (!(power >= 0.0)) throw std::invalid_argument("noise power must be non-negative");
  if (power == 0.0) return;
  const double sigma = std::sqrt(0.5 * power);
  for (std::size_t tx = 0; tx < cube.num_tx(); ++tx) {
    for (std::size_t rx = 0; rx < cube.num_rx(); ++rx) {
      CounterRng rng(stream_key(seed, tx, rx));
      for (auto& s : cube.channel(tx, rx)) {
        // Box-Muller: one draw pair gives the real and imaginary parts.
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        const double radius = sigma * std::sqrt(-2.0 * std::log(u1));
        s += std::polar(radius, kTwoPi * u2);
      }
    }
  }
}

void write_cube(std::ostream& out, const BasebandCube& cube) {
  out.write(kCubeMagic, sizeof(kCubeMagic));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(cube.num_tx()));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(cube.num_rx()));
  binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(cube.num_freq()));
  binary::put<double>(out, cube.waveform().f0);
  binary::put<double>(out, cube.waveform().delta_f);
  for (const auto& s : cube.samples()) {
    binary::put<double>(out, s.real());
    binary::put<double>(out, s.imag());
  }
}

BasebandCube read_cube(std::istream& in, const ArrayGeometry& array) {
  char magic[sizeof(kCubeMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kCubeMagic))) {
    throw std::runtime_error("not a baseband cube file");
  }
  const auto n_tx = binary::get<std::uint32_t>(in);
  const auto n_rx = binary::get<std::uint32_t>(in);
  const auto n_f = binary::get<std::uint32_t>(in);
  Waveform w;
  w.f0 = binary::get<double>(in);
  w.delta_f = binary::get<double>(in);
  w.n_f = static_cast<int>(n_f);
  if (n_tx != array.num_tx() || n_rx != array.num_rx()) {
    throw std::invalid_argument("cube is " + std::to_string(n_tx) + "x" + std::to_string(n_rx) +
                                " channels but the array has " + std::to_string(array.num_tx()) +
                                " Tx and " + std::to_string(array.num_rx()) + " Rx");
  }
  BasebandCube cube(w, array);
  for (auto& s : cube.samples()) {
    const double re = binary::get<double>(in);
    const double im = binary::get<double>(in);
    s = {re, im};
  }
  return cube;
}

void save_cube(const std::filesystem::path& path, const BasebandCube& cube) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_cube(out, cube);
}

BasebandCube load_cube(const std::filesystem::path& path, const ArrayGeometry& array) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_cube(in, array);
}

}  // namespace handray
