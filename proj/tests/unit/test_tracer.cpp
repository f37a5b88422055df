#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "handray/procedural.hpp"
#include "handray/tracer.hpp"

using namespace handray;

namespace {

MaterialMap uniform(double alpha) { return MaterialMap{MaterialParams{alpha}, {}}; }

// Tiny facet at z = 0.3 facing the array plane.
TriangleMesh facet(double size) {
  return TriangleMesh({Vec3(-size, -size, 0.3), Vec3(size, -size, 0.3), Vec3(0, size, 0.3)},
                      {Face{0, 2, 1}});
}

}  // namespace

TEST_CASE("empty scene yields no records") {
  const auto scene = build_accel(TriangleMesh{});
  const auto array = build_square_array(3, 0.01);
  CHECK(trace_all(scene, array, uniform(0.5), TraceConfig{}).empty());
}

TEST_CASE("specular facet returns to a coaxial receiver") {
  REQUIRE(facet(5e-4).face_normals()[0].z() < 0);
  const auto scene = build_accel(facet(5e-4));
  const ArrayGeometry array({Vec3::Zero()}, {Vec3(5e-4, 0, 0)});
  TraceConfig config;
  config.rays_per_triangle = 64;
  const auto records = trace_all(scene, array, uniform(0.0), config);
  CHECK(records.size() == 64);
  for (const auto& r : records) {
    CHECK(r.tx == 0);
    CHECK(r.rx == 0);
    CHECK(r.bounces == 1);
    CHECK(std::abs(r.length_d - 0.6) <= config.rx_radius);
  }
}

TEST_CASE("tilted specular plate sends nothing back") {
  const auto scene = build_accel(make_plate(0.05, 0.05, 4, Vec3(0, 0, 0.3), 45.0));
  const ArrayGeometry array({Vec3::Zero()}, {Vec3(1e-3, 0, 0), Vec3(-1e-3, 0, 0)});
  TraceConfig config;
  config.rays_per_triangle = 256;
  CHECK(trace_all(scene, array, uniform(0.0), config).empty());
  // Diffuse scattering from the same plate does reach the array.
  config.rx_radius = 0.01;
  CHECK_FALSE(trace_all(scene, array, uniform(1.0), config).empty());
}

TEST_CASE("receiver capture geometry") {
  const auto empty = build_accel(TriangleMesh{});
  const ArrayGeometry array({Vec3(1, 1, 1)}, {Vec3(1e-3, 0, 0), Vec3(3e-3, 0, 0), Vec3(0, 0, 0.5)});
  const Vec3 origin(0, 0, 0.3), down(0, 0, -1);

  auto caps = capture_rx(origin, down, INFINITY, array, empty, 2e-3);
  REQUIRE(caps.size() == 1);
  CHECK(caps[0].rx == 0);
  CHECK(caps[0].length == doctest::Approx(std::sqrt(0.09 + 1e-6)).epsilon(1e-14));

  // Closest approach beyond the segment end.
  CHECK(capture_rx(origin, down, 0.1, array, empty, 2e-3).empty());
  // Receiver behind the origin.
  CHECK(capture_rx(origin, -down, INFINITY, array, empty, 2e-3).size() == 1);
  CHECK(capture_rx(origin, -down, INFINITY, array, empty, 2e-3)[0].rx == 2);
  // Radius boundary.
  CHECK(capture_rx(origin, down, INFINITY, array, empty, 3.1e-3).size() == 2);

  const auto blocker = build_accel(make_plate(0.1, 0.1, 1, Vec3(0, 0, 0.15)));
  CHECK(capture_rx(origin, down, INFINITY, array, blocker, 2e-3).empty());
}

TEST_CASE("ray budget") {
  const auto mesh = make_plate(0.1, 0.05, 3, Vec3(0, 0, 0.3));
  TraceConfig config;
  config.rays_per_triangle = 10;
  const auto fixed = rays_per_face(mesh, config);
  CHECK(std::all_of(fixed.begin(), fixed.end(), [](int c) { return c == 10; }));

  TriangleMesh mixed = make_plate(0.1, 0.1, 1, Vec3(0, 0, 0.3));
  mixed.append(make_plate(0.001, 0.001, 1, Vec3(0, 0, 0.2)));
  config.budget = RayBudget::kAreaWeighted;
  const auto weighted = rays_per_face(mixed, config);
  CHECK(weighted[0] > weighted[2]);
  CHECK(weighted[2] == 1);
  CHECK(weighted[0] == 20);
}

TEST_CASE("trace output is independent of thread count and Tx order") {
  const auto scene = build_accel(make_plate(0.06, 0.06, 3, Vec3(0.005, 0, 0.2), 10.0));
  const auto array = build_square_array(4, 0.02);
  TraceConfig config;
  config.rays_per_triangle = 64;
  config.rx_radius = 0.01;
  const auto reference = trace_all(scene, array, uniform(0.5), config, 1);
  REQUIRE_FALSE(reference.empty());
  CHECK(std::is_sorted(reference.begin(), reference.end(), record_less));

  std::vector<std::uint32_t> order(array.num_tx());
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937 shuffle_rng(3);
  for (unsigned threads : {2u, 4u, 7u}) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    CHECK(trace_all(scene, array, uniform(0.5), config, threads, order) == reference);
  }

  // Per-Tx traces partition the full result.
  std::vector<PathRecord> merged;
  for (std::uint32_t tx = 0; tx < array.num_tx(); ++tx) {
    const auto part = trace_tx(scene, array, uniform(0.5), config, tx);
    for (const auto& r : part) CHECK(r.tx == tx);
    merged.insert(merged.end(), part.begin(), part.end());
  }
  CHECK(merged == reference);

  config.master_seed = 2;
  CHECK(trace_all(scene, array, uniform(0.5), config) != reference);
}

TEST_CASE("record counts and lengths are bounded") {
  const auto mesh = make_box(Vec3(0, 0, 0.25), Vec3(0.05, 0.05, 0.05));
  const auto scene = build_accel(mesh);
  const auto array = build_square_array(3, 0.02);
  TraceConfig config;
  config.rays_per_triangle = 32;
  config.max_bounces = 3;
  config.rx_radius = 0.02;
  const auto records = trace_all(scene, array, uniform(1.0), config);
  REQUIRE_FALSE(records.empty());
  const std::size_t bound = array.num_tx() * mesh.num_faces() * 32 * 3 * array.num_rx();
  CHECK(records.size() <= bound);
  for (const auto& r : records) {
    CHECK(r.bounces >= 1);
    CHECK(r.bounces <= 3);
    CHECK(r.tx < array.num_tx());
    CHECK(r.rx < array.num_rx());
    // Any path reaches the box and returns.
    const double direct = (array.tx()[r.tx] - Vec3(0, 0, 0.225)).norm();
    CHECK(r.length_d > 0.2);
    CHECK(r.length_d >= direct);
  }
}

TEST_CASE("material alpha changes the record set") {
  const auto scene = build_accel(make_plate(0.08, 0.08, 4, Vec3(0, 0, 0.3), 20.0));
  const auto array = build_square_array(4, 0.02);
  TraceConfig config;
  config.rays_per_triangle = 64;
  config.rx_radius = 0.01;
  const auto a0 = trace_all(scene, array, uniform(0.0), config);
  const auto a1 = trace_all(scene, array, uniform(1.0), config);
  CHECK(a0 != a1);
  CHECK(a1.size() > a0.size());

  MaterialMap bad = uniform(0.5);
  bad.per_group = {MaterialParams{2.0}};
  CHECK_THROWS(trace_all(scene, array, bad, config));
  config.rx_radius = 0.0;
  CHECK_THROWS(trace_all(scene, array, uniform(0.5), config));
  config.rx_radius = 0.01;
  const std::uint32_t bad_tx[] = {99};
  CHECK_THROWS_AS(trace_all(scene, array, uniform(0.5), config, 1, bad_tx), std::out_of_range);
}

TEST_CASE("per-group materials") {
  TriangleMesh scene_mesh = make_plate(0.05, 0.05, 2, Vec3(0, 0, 0.3)).with_group(0);
  scene_mesh.append(make_plate(0.05, 0.05, 2, Vec3(0.1, 0, 0.3)).with_group(1));
  const auto scene = build_accel(scene_mesh);
  const auto array = build_square_array(3, 0.02);
  TraceConfig config;
  config.rx_radius = 0.01;
  MaterialMap split{MaterialParams{0.0}, {MaterialParams{0.0}, MaterialParams{1.0}}};
  MaterialMap all_specular = uniform(0.0);
  CHECK(trace_all(scene, array, split, config) != trace_all(scene, array, all_specular, config));
  CHECK(split.lookup(5).alpha == 0.0);
}

TEST_CASE("path record files round-trip") {
  const std::vector<PathRecord> records{
      {0, 1, 0.612345678901234567, 1}, {3, 2, 1.0 / 3.0, 2}, {7, 0, 5e-3, 3}};
  std::stringstream text;
  write_records_text(text, records);
  CHECK(read_records_text(text) == records);

  std::stringstream bin;
  write_records_binary(bin, records);
  CHECK(bin.str().size() == records.size() * 20);
  CHECK(read_records_binary(bin) == records);

  std::stringstream truncated(bin.str().substr(0, 30));
  CHECK_THROWS(read_records_binary(truncated));
  std::stringstream garbage("0 1 abc 2\n");
  CHECK_THROWS(read_records_text(garbage));

  const auto dir = std::filesystem::temp_directory_path() / "handray_records_test";
  std::filesystem::create_directories(dir);
  save_records(dir / "r.bin", records);
  save_records(dir / "r.txt", records);
  CHECK(load_records(dir / "r.bin") == records);
  CHECK(load_records(dir / "r.txt") == records);
  std::filesystem::remove_all(dir);
}
