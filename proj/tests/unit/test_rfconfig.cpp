#include <doctest.h>

#include <cmath>
#include <set>

#include "handray/rfconfig.hpp"

using namespace handray;

TEST_CASE("paper-sized square array") {
  const auto array = build_square_array(47, 3e-3);
  CHECK(array.num_tx() == 94);
  CHECK(array.num_rx() == 94);
  // Side length spans the Tx corners.
  double xmin = 1e9, xmax = -1e9;
  for (const auto& p : array.tx()) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    CHECK(std::abs(std::abs(p.y()) - 0.069) < 1e-12);
  }
  CHECK(xmax - xmin == doctest::Approx(0.138).epsilon(1e-12));
  CHECK(array.aperture_extent() == doctest::Approx(0.141).epsilon(1e-12));
  CHECK(array.center().norm() < 1e-12);
}

TEST_CASE("two-element array puts Tx on the corners") {
  const auto array = build_square_array(2, 1.0, 0.25);
  REQUIRE(array.num_tx() == 4);
  std::set<std::pair<double, double>> corners;
  for (const auto& p : array.tx()) {
    corners.insert({p.x(), p.y()});
    CHECK(p.z() == 0.25);
  }
  CHECK(corners == std::set<std::pair<double, double>>{{-0.5, -0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0.5, 0.5}});
  for (const auto& p : array.rx()) CHECK(std::abs(p.x()) == 1.0);
}

TEST_CASE("array invariants") {
  for (int n : {2, 3, 12, 47}) {
    const auto array = build_square_array(n, 3e-3);
    std::vector<Vec3> all(array.tx());
    all.insert(all.end(), array.rx().begin(), array.rx().end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) CHECK((all[i] - all[j]).norm() > 1e-6);
    }
    // Point symmetry through the centre, as a set.
    for (const auto& p : all) {
      const Vec3 mirrored = -p;
      const bool found = std::any_of(all.begin(), all.end(),
                                     [&](const Vec3& q) { return (q - mirrored).norm() < 1e-12; });
      CHECK(found);
    }
  }
  CHECK_THROWS_AS(build_square_array(1, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(build_square_array(4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry({Vec3::Zero()}, {Vec3(0, 0, 1e-7)}), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry({}, {Vec3::Zero()}), std::invalid_argument);
}

TEST_CASE("waveform grid") {
  const auto w = build_waveform(72e9, 82e9, 128);
  CHECK(w.f0 == 72e9);
  CHECK(w.delta_f == doctest::Approx(78.740157e6).epsilon(1e-8));
  CHECK(w.frequency(127) == doctest::Approx(82e9).epsilon(1e-15));
  for (int n = 0; n + 1 < w.n_f; ++n) CHECK(std::abs(w.frequency(n + 1) - w.frequency(n) - w.delta_f) < 1e-3);
  // c / (2 delta_f)
  CHECK(w.unambiguous_range() == doctest::Approx(1.9036).epsilon(1e-4));

  const auto tiny = build_waveform(1, 2, 2);
  CHECK(tiny.delta_f == 1.0);
  CHECK(tiny.frequency(0) == 1.0);
  CHECK(tiny.frequency(1) == 2.0);

  CHECK_THROWS(build_waveform(2, 1, 8));
  CHECK_THROWS(build_waveform(1, 2, 1));
}

TEST_CASE("derived metrics") {
  const auto w = build_waveform(72e9, 82e9, 128);
  const auto m = derived_metrics(w, 0.30, 0.138);
  CHECK(m.bandwidth == doctest::Approx(10e9));
  CHECK(m.range_resolution == doctest::Approx(0.0149896).epsilon(1e-5));
  // lambda at 77 GHz = 3.8934 mm; 3.8934e-3 * 0.3 / 0.276
  CHECK(m.lateral_resolution == doctest::Approx(4.2320e-3).epsilon(1e-4));
  CHECK(m.lateral_resolution < 5e-3);

  const auto wide = build_waveform(72e9, 92e9, 128);
  CHECK(derived_metrics(wide, 0.3, 0.138).range_resolution ==
        doctest::Approx(m.range_resolution / 2));
  CHECK_THROWS(derived_metrics(w, 0.0, 0.1));
}

TEST_CASE("voxel grid") {
  const VoxelGrid paper(Vec3(-0.1, -0.1, 0.26), Vec3(0.1, 0.1, 0.34), Vec3::Constant(1e-3));
  CHECK(paper.counts() == std::array<int, 3>{201, 201, 81});
  CHECK(paper.size() == 201u * 201u * 81u);
  CHECK(paper.center(100, 100, 40).isApprox(Vec3(0, 0, 0.30), 1e-12));
  CHECK(paper.center(paper.index(7, 9, 11)).isApprox(paper.center(7, 9, 11)));

  CHECK_THROWS(VoxelGrid(Vec3::Zero(), Vec3(1, 1, 0), Vec3::Ones()));
  CHECK_THROWS(VoxelGrid(Vec3::Zero(), Vec3::Ones(), Vec3(1, 0, 1)));
}
