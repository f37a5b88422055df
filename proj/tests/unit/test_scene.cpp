#include <doctest.h>

#include <cmath>
#include <sstream>
#include <thread>

#include "handray/procedural.hpp"
#include "handray/scene.hpp"
#include "oracles.hpp"

using namespace handray;

namespace {

TriangleMesh parse(const std::string& text, const RigidTransform& t = {}) {
  std::istringstream in(text);
  return parse_obj(in, t);
}

constexpr const char* kUnitCube = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
)";

Vec3 random_unit(CounterRng& rng) {
  const double z = 2 * rng.uniform() - 1;
  const double phi = 2 * M_PI * rng.uniform();
  const double r = std::sqrt(1 - z * z);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

TEST_CASE("load single triangle") {
  const auto mesh = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  REQUIRE(mesh.num_faces() == 1);
  CHECK(mesh.face_normals()[0].isApprox(Vec3(0, 0, 1), 1e-15));

  const auto flipped = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 3 2\n");
  CHECK(flipped.face_normals()[0].isApprox(Vec3(0, 0, -1), 1e-15));
}

TEST_CASE("load unit cube with quad faces") {
  const auto mesh = parse(kUnitCube);
  CHECK(mesh.vertices().size() == 8);
  CHECK(mesh.num_faces() == 12);
  CHECK(mesh.total_area() == doctest::Approx(6.0));
  // Normals are unit and orthogonal to both face edges.
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Vec3& n = mesh.face_normals()[f];
    CHECK(std::abs(n.norm() - 1.0) < 1e-9);
    CHECK(std::abs(n.dot(mesh.vertex(f, 1) - mesh.vertex(f, 0))) < 1e-6);
    CHECK(std::abs(n.dot(mesh.vertex(f, 2) - mesh.vertex(f, 0))) < 1e-6);
  }
  // Winding is outward: every normal points away from the centre.
  const Vec3 center(0.5, 0.5, 0.5);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    CHECK(mesh.face_normals()[f].dot(mesh.vertex(f, 0) - center) > 0.0);
  }
}

TEST_CASE("obj parser accepts slash forms, negative indices and ignores other records") {
  const auto mesh = parse(
      "o thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\nusemtl skin\ns off\n"
      "f 1/1/1 2/2/1 3/3/1\nf -3 -2 -1\n");
  CHECK(mesh.num_faces() == 2);
}

TEST_CASE("obj parse errors") {
  CHECK_THROWS_AS(parse("v 0 0\n"), MeshParseError);
  CHECK_THROWS_AS(parse("v 0 0 zero\n"), MeshParseError);
  CHECK_THROWS_AS(parse("v 0 0 0\nv 1 0 0\nf 1 2\n"), MeshParseError);
  CHECK_THROWS_AS(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), MeshParseError);
  try {
    parse("v 0 0 0\n\nf 1 2 x\n");
    FAIL("expected parse error");
  } catch (const MeshParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS(load_mesh("/nonexistent/mesh.obj"));
}

TEST_CASE("degenerate faces are rejected with their indices") {
  try {
    parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf 1 2 3\nf 1 2 4\nf 2 2 3\n");
    FAIL("expected degenerate-face error");
  } catch (const DegenerateFaceError& e) {
    CHECK(e.faces() == std::vector<std::size_t>{1, 2});
  }
}

TEST_CASE("transform is applied before normals are computed") {
  const auto t = RigidTransform::from_euler_deg(Vec3(90, 0, 0), Vec3(0, 0, 0.3), 0.01);
  const auto mesh = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", t);
  // Rotating +z by 90 degrees about x gives -y.
  CHECK(mesh.face_normals()[0].isApprox(Vec3(0, -1, 0), 1e-12));
  CHECK(mesh.vertices()[1].isApprox(Vec3(0.01, 0, 0.3), 1e-12));
  CHECK(mesh.vertices()[2].isApprox(Vec3(0, 0, 0.31), 1e-12));

  RigidTransform bad;
  bad.scale = 0.0;
  CHECK_THROWS_AS(parse("v 0 0 0\n", bad), std::invalid_argument);
  RigidTransform mirror;
  mirror.rotation = Eigen::Vector3d(1, 1, -1).asDiagonal();
  CHECK_THROWS_AS(parse("v 0 0 0\n", mirror), std::invalid_argument);
}

TEST_CASE("accel structure basics") {
  SUBCASE("single face gives a single leaf") {
    const auto accel = build_accel(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"));
    CHECK(accel.nodes().size() == 1);
    CHECK(accel.leaf_count() == 1);
  }
  SUBCASE("empty mesh never hits") {
    const auto accel = build_accel(TriangleMesh{});
    CHECK_FALSE(accel.intersect({Vec3::Zero(), Vec3::UnitZ()}, 0, 1e9));
    CHECK_FALSE(accel.occluded(Vec3::Zero(), Vec3(0, 0, 1)));
  }
}

TEST_CASE("intersect examples") {
  const auto accel = build_accel(parse("v -1 -1 0\nv 1 -1 0\nv 0 1 0\nf 1 2 3\n"));
  const auto hit = accel.intersect({Vec3(0, 0, -1), Vec3(0, 0, 1)}, 0.0, 10.0);
  REQUIRE(hit);
  CHECK(hit->point.isApprox(Vec3::Zero(), 1e-12));
  CHECK(hit->distance == doctest::Approx(1.0));
  CHECK(hit->normal.isApprox(Vec3(0, 0, -1)));  // faces the ray

  // From the other side the normal flips.
  const auto back = accel.intersect({Vec3(0, 0, 1), Vec3(0, 0, -1)}, 0.0, 10.0);
  REQUIRE(back);
  CHECK(back->normal.isApprox(Vec3(0, 0, 1)));

  CHECK_FALSE(accel.intersect({Vec3(0, 0, -1), Vec3(1, 0, 0)}, 0.0, 10.0));  // parallel
  CHECK_FALSE(accel.intersect({Vec3(0, 0, 0.5), Vec3(1, 0, 0)}, 0.0, 10.0));
  // t_max is inclusive, t_min exclusive.
  CHECK(accel.intersect({Vec3(0, 0, -1), Vec3(0, 0, 1)}, 0.0, 1.0));
  CHECK_FALSE(accel.intersect({Vec3(0, 0, -1), Vec3(0, 0, 1)}, 0.0, 0.999));
  CHECK_FALSE(accel.intersect({Vec3(0, 0, -1), Vec3(0, 0, 1)}, 1.0, 2.0));
}

TEST_CASE("ray through cube centre hits the front face") {
  const auto mesh = parse(kUnitCube);
  const auto accel = build_accel(mesh);
  const Vec3 o(0.5, 0.5, -2.0);
  const Vec3 d(0, 0, 1);
  const auto hit = accel.intersect({o, d}, 0, 100);
  const auto ref = oracle::nearest_hit(mesh, o, d, kIntersectionEpsilon, 100);
  REQUIRE(hit);
  REQUIRE(ref);
  CHECK(hit->distance == doctest::Approx(2.0));
  CHECK(std::abs(mesh.vertex(hit->face_id, 0).z()) < 1e-12);  // z = 0 face
  CHECK(hit->face_id == ref->face);
}

TEST_CASE("accel matches brute force on random rays") {
  auto check_mesh = [](const TriangleMesh& mesh, int n_rays, std::uint64_t seed) {
    const auto accel = build_accel(mesh);
    Eigen::AlignedBox3d box;
    for (const auto& v : mesh.vertices()) box.extend(v);
    CounterRng rng(seed);
    int hits = 0;
    for (int i = 0; i < n_rays; ++i) {
      // Origins around the mesh, directions toward a random interior point.
      const Vec3 o = box.center() + 1.5 * box.sizes().norm() * random_unit(rng);
      const Vec3 target = box.min() + Vec3(rng.uniform(), rng.uniform(), rng.uniform())
                                          .cwiseProduct(box.sizes());
      const Vec3 d = (target - o).normalized();
      const auto hit = accel.intersect({o, d}, 0.0, 1e9);
      const auto ref = oracle::nearest_hit(mesh, o, d, kIntersectionEpsilon, 1e9);
      REQUIRE(hit.has_value() == ref.has_value());
      if (!hit) continue;
      ++hits;
      CHECK(hit->face_id == ref->face);
      CHECK(std::abs(hit->distance - ref->distance) <= 1e-9 * ref->distance);
      CHECK(hit->normal.dot(d) < 0.0);
      CHECK((hit->point - (o + hit->distance * d)).norm() <= 1e-9 * hit->distance);
    }
    return hits;
  };
  SUBCASE("cube, 1000 rays") { CHECK(check_mesh(parse(kUnitCube), 1000, 11) > 500); }
  SUBCASE("200-face meshes, 10^4 rays") {
    CHECK(check_mesh(make_plate(0.1, 0.1, 10, Vec3(0, 0, 0.3), 20.0), 10000, 12) > 1000);
    std::vector<Vec3> path{{0, 0, 0}, {0.01, 0.02, 0.05}, {0.0, 0.05, 0.08}, {-0.02, 0.06, 0.1}};
    std::vector<double> a(4, 0.01), b(4, 0.006);
    const auto tube = make_tube(path, a, b, 16);
    CHECK(tube.num_faces() <= 200);
    CHECK(check_mesh(tube, 10000, 13) > 1000);
  }
}

TEST_CASE("occlusion") {
  const auto empty = build_accel(TriangleMesh{});
  CHECK_FALSE(empty.occluded(Vec3(0, 0, 0), Vec3(1, 2, 3)));

  const auto plate = build_accel(make_plate(1.0, 1.0, 1, Vec3(0, 0, 0.5)));
  CHECK(plate.occluded(Vec3(0, 0, 0), Vec3(0, 0, 1)));
  CHECK_FALSE(plate.occluded(Vec3(0, 0, 0), Vec3(0, 0, 0.4)));
  // Endpoints on the surface itself do not self-occlude.
  CHECK_FALSE(plate.occluded(Vec3(0.1, 0.1, 0.5), Vec3(0, 0, 0)));
  CHECK_FALSE(plate.occluded(Vec3(0, 0, 0), Vec3(0.1, 0.1, 0.5)));
}

TEST_CASE("concurrent queries agree with serial ones") {
  const auto accel = build_accel(make_hand());
  std::vector<double> serial(2000), parallel(2000);
  auto ray = [](int i) {
    CounterRng rng(stream_key(5, static_cast<std::uint64_t>(i)));
    const Vec3 target(0.1 * (rng.uniform() - 0.5), 0.2 * (rng.uniform() - 0.5), 0.3);
    return Ray{Vec3::Zero(), target.normalized()};
  };
  for (int i = 0; i < 2000; ++i) {
    const auto h = accel.intersect(ray(i), 0, 10);
    serial[i] = h ? h->distance : -1.0;
  }
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < 2000; i += 4) {
          const auto h = accel.intersect(ray(i), 0, 10);
          parallel[i] = h ? h->distance : -1.0;
        }
      });
    }
  }
  CHECK(serial == parallel);
}

TEST_CASE("triangle sampling") {
  const auto mesh = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");

  SUBCASE("single sample lies inside") {
    CounterRng rng(3);
    const auto p = sample_triangle_points(mesh, 0, 1, rng)[0];
    CHECK(p.x() >= 0.0);
    CHECK(p.y() >= 0.0);
    CHECK(p.x() + p.y() <= 1.0);
    CHECK(p.z() == 0.0);
  }
  SUBCASE("same seed, same points") {
    CounterRng a(99), b(99);
    CHECK(sample_triangle_points(mesh, 0, 50, a) == sample_triangle_points(mesh, 0, 50, b));
  }
  SUBCASE("centroid and KS test on the barycentric coordinate") {
    CounterRng rng(2024);
    const auto pts = sample_triangle_points(mesh, 0, 100000, rng);
    Vec3 mean = Vec3::Zero();
    std::vector<double> u;
    for (const auto& p : pts) {
      mean += p;
      u.push_back(p.x());  // barycentric weight of vertex (1,0,0)
    }
    mean /= static_cast<double>(pts.size());
    CHECK((mean - Vec3(1.0 / 3, 1.0 / 3, 0)).norm() < 0.01);
    // Marginal of one barycentric coordinate: F(u) = 1 - (1 - u)^2.
    const double d = oracle::ks_statistic(u, [](double x) { return 1.0 - (1.0 - x) * (1.0 - x); });
    CHECK(d < 1.628 / std::sqrt(100000.0));
  }
  SUBCASE("points stay in the plane of a tilted face") {
    const auto plate = make_plate(0.2, 0.1, 1, Vec3(0.1, 0.2, 0.3), 37.0);
    CounterRng rng(8);
    for (const auto& p : sample_triangle_points(plate, 1, 1000, rng)) {
      CHECK(std::abs(plate.face_normals()[1].dot(p - plate.vertex(1, 0))) < 1e-9);
    }
  }
  SUBCASE("bad arguments") {
    CounterRng rng(1);
    CHECK_THROWS(sample_triangle_points(mesh, 1, 1, rng));
    CHECK_THROWS(sample_triangle_points(mesh, 0, 0, rng));
  }
}
