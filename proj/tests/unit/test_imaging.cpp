#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "handray/imaging.hpp"
#include "handray/rng.hpp"

using namespace handray;

namespace {

std::vector<PathRecord> point_target(const ArrayGeometry& array, const Vec3& p) {
  std::vector<PathRecord> recs;
  for (std::uint32_t t = 0; t < array.num_tx(); ++t)
    for (std::uint32_t r = 0; r < array.num_rx(); ++r)
      recs.push_back({t, r, (array.tx()[t] - p).norm() + (array.rx()[r] - p).norm(), 1});
  return recs;
}

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

// Independent evaluation of the matched filter at one point.
Complex oracle_voxel(const BasebandCube& cube, const Vec3& p) {
  std::complex<long double> acc = 0;
  const auto& w = cube.waveform();
  for (std::size_t t = 0; t < cube.num_tx(); ++t)
    for (std::size_t r = 0; r < cube.num_rx(); ++r) {
      const long double path = (cube.array().tx()[t] - p).norm() + (cube.array().rx()[r] - p).norm();
      for (std::size_t n = 0; n < cube.num_freq(); ++n) {
        const long double f = w.f0 + static_cast<long double>(n) * w.delta_f;
        const long double th = 2.0L * std::numbers::pi_v<long double> * f * path / 299792458.0L;
        const auto s = cube.at(t, r, n);
        acc += std::complex<long double>(s.real(), s.imag()) *
               std::complex<long double>(std::cos(th), std::sin(th));
      }
    }
  return {double(acc.real()), double(acc.imag())};
}

}  // namespace

TEST_CASE("zero cube gives a zero volume") {
  const auto array = build_square_array(3, 0.01);
  const BasebandCube cube(build_waveform(72e9, 82e9, 8), array);
  const VoxelGrid grid(Vec3(-0.01, -0.01, 0.29), Vec3(0.01, 0.01, 0.31), Vec3::Constant(0.005));
  const auto vol = backproject(cube, grid, 2);
  CHECK(vol.values.size() == grid.size());
  for (const auto& v : vol.values) CHECK(v == Complex{});
  CHECK_THROWS_AS(finalize_image(max_project(vol), -15), std::domain_error);
}

TEST_CASE("optimized and reference back-projection agree with the oracle") {
  const auto array = build_square_array(4, 0.01);
  const auto w = build_waveform(72e9, 82e9, 16);
  auto cube = synthesize_cube(point_target(array, Vec3(0.002, -0.001, 0.3)), w, array);
  add_noise(cube, 0.5, 3);
  // Spans more than one voxel block.
  const VoxelGrid grid(Vec3(-0.02, -0.02, 0.28), Vec3(0.02, 0.02, 0.32), Vec3::Constant(0.002));
  REQUIRE(grid.size() > 1024);
  const auto fast = backproject(cube, grid, 3);
  const auto ref = backproject_reference(cube, grid);
  const double scale = max_abs(ref.values);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(fast.values[i] - ref.values[i]));
  CHECK(worst / scale < 1e-9);

  CounterRng rng(1);
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = rng() % grid.size();
    CHECK(std::abs(ref.values[i] - oracle_voxel(cube, grid.center(i))) / scale < 1e-9);
  }
  CHECK(backproject(cube, grid, 1).values == fast.values);
}

TEST_CASE("point target focuses at its voxel") {
  const auto array = build_square_array(12, 0.01);
  const auto w = build_waveform(72e9, 82e9, 32);
  const Vec3 target(0.004, -0.006, 0.30);
  const auto cube = synthesize_cube(point_target(array, target), w, array);
  const VoxelGrid grid(Vec3(-0.01, -0.01, 0.28), Vec3(0.01, 0.01, 0.32), Vec3::Constant(0.002));
  const auto vol = backproject(cube, grid);
  std::size_t best = 0;
  for (std::size_t i = 0; i < vol.values.size(); ++i)
    if (std::abs(vol.values[i]) > std::abs(vol.values[best])) best = i;
  CHECK((grid.center(best) - target).norm() < 1e-9);
  // Coherent gain: every (tx, rx, n) term adds in phase at the target.
  CHECK(std::abs(vol.values[best]) == doctest::Approx(double(array.num_tx() * array.num_rx() * 32)));
}

TEST_CASE("max projection") {
  const VoxelGrid grid(Vec3(0, 0, 0), Vec3(1, 0.4, 2), Vec3::Ones());
  REQUIRE(grid.counts() == std::array<int, 3>{2, 1, 3});
  Volume vol{grid, std::vector<Complex>(grid.size())};
  vol.values[grid.index(0, 0, 0)] = 1.0;
  vol.values[grid.index(0, 0, 1)] = Complex(0, 3);
  vol.values[grid.index(0, 0, 2)] = 2.0;
  // Tie between z = 0 and z = 2 resolves to the smaller z.
  vol.values[grid.index(1, 0, 0)] = 4.0;
  vol.values[grid.index(1, 0, 2)] = -4.0;
  const auto img = max_project(vol);
  CHECK(img.nx == 2);
  CHECK(img.ny == 1);
  CHECK(img.amplitude[0] == 3.0);
  CHECK(img.depth_z[0] == 1.0);
  CHECK(img.amplitude[1] == 4.0);
  CHECK(img.depth_z[1] == 0.0);
  CHECK(img.x0 == 0.0);
  CHECK(img.dx == 1.0);
}

TEST_CASE("dynamic range clipping") {
  RadarImage img;
  img.nx = 3;
  img.ny = 1;
  img.amplitude = {2.0, 1.0, 0.02};
  img.depth_z = {0, 0, 0};
  const auto out = finalize_image(img, -15.0);
  CHECK(out.amplitude[0] == 1.0);
  CHECK(out.amplitude[1] == 0.5);
  CHECK(out.amplitude[2] == doctest::Approx(0.177827941).epsilon(1e-8));
  CHECK(out.floor_db == -15.0);

  const auto raw = finalize_image(img, -INFINITY);
  CHECK(raw.amplitude[2] == 0.01);
  for (double bad : {0.0, 3.0, double(NAN)}) CHECK_THROWS_AS(finalize_image(img, bad), std::invalid_argument);

  // Every output is at or above the floor and at most one.
  CounterRng rng(4);
  RadarImage many;
  many.nx = 1000;
  many.ny = 1;
  many.depth_z.assign(1000, 0.0);
  for (int i = 0; i < 1000; ++i) many.amplitude.push_back(std::pow(10.0, -6 * rng.uniform()));
  const auto clipped = finalize_image(many, -20.0);
  for (double a : clipped.amplitude) {
    CHECK(a <= 1.0);
    CHECK(a >= 0.1 - 1e-15);
  }
}

TEST_CASE("volume and image files") {
  const VoxelGrid grid(Vec3(-0.01, 0, 0.3), Vec3(0.01, 0.01, 0.31), Vec3::Constant(0.005));
  Volume vol{grid, std::vector<Complex>(grid.size())};
  for (std::size_t i = 0; i < vol.values.size(); ++i) vol.values[i] = Complex(double(i), -1.0);
  std::stringstream buf;
  write_volume(buf, vol);
  const auto back = read_volume(buf);
  CHECK(back.grid.counts() == grid.counts());
  CHECK(back.grid.min() == grid.min());
  CHECK(back.magnitudes == vol.magnitudes());

  std::stringstream cplx;
  write_volume_complex(cplx, vol);
  CHECK(cplx.str().size() == 9 * 8 + 3 * 4 + grid.size() * 16);

  const auto dir = std::filesystem::temp_directory_path() / "handray_image_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto img = finalize_image(max_project(vol), -15.0);
  const auto files = export_image(dir, img, true);
  CHECK(files.size() >= 5);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  std::ifstream pgm(dir / "amplitude.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  pgm >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == img.nx);
  CHECK(h == img.ny);
  CHECK(maxval == 65535);
  pgm.get();
  std::vector<unsigned char> pixels(std::size_t(w) * h * 2);
  pgm.read(reinterpret_cast<char*>(pixels.data()), pixels.size());
  CHECK(pgm.gcount() == static_cast<std::streamsize>(pixels.size()));
  std::filesystem::remove_all(dir);
}
