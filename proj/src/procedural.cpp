#include "handray/procedural.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace handray {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Interpolates a polyline so each span gets `per_span` segments.
std::vector<Vec3> refine(std::span<const Vec3> pts, int per_span) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (int k = 0; k < per_span; ++k) out.push_back(pts[i] + (pts[i + 1] - pts[i]) * (double(k) / per_span));
  }
  out.push_back(pts.back());
  return out;
}

}  // namespace

TriangleMesh make_plate(double width, double height, int cells, const Vec3& center,
                        double tilt_deg) {
  if (cells < 1) throw std::invalid_argument("plate needs at least one cell");
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(tilt_deg * kPi / 180.0, Vec3::UnitX()).toRotationMatrix();
  std::vector<Vec3> vertices;
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= cells; ++i) {
      const Vec3 local((double(i) / cells - 0.5) * width, (double(j) / cells - 0.5) * height, 0.0);
      vertices.push_back(center + rot * local);
    }
  }
  std::vector<Face> faces;
  const auto id = [cells](int i, int j) { return static_cast<std::uint32_t>(j * (cells + 1) + i); };
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      // Clockwise seen from +z, so normals point to -z.
      faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
      faces.push_back({id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh make_box(const Vec3& center, const Vec3& size) {
  std::vector<Vec3> v;
  for (int k = 0; k < 8; ++k) {
    const Vec3 sign((k & 1) ? 0.5 : -0.5, (k & 2) ? 0.5 : -0.5, (k & 4) ? 0.5 : -0.5);
    v.push_back(center + sign.cwiseProduct(size));
  }
  std::vector<Face> f = {
      {0, 2, 1}, {1, 2, 3},  // -z
      {4, 5, 6}, {5, 7, 6},  // +z
      {0, 1, 4}, {1, 5, 4},  // -y
      {2, 6, 3}, {3, 6, 7},  // +y
      {0, 4, 2}, {2, 4, 6},  // -x
      {1, 3, 5}, {3, 7, 5},  // +x
  };
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh make_tube(std::span<const Vec3> path, std::span<const double> semi_a,
                       std::span<const double> semi_b, int segments) {
  if (path.size() < 2 || semi_a.size() != path.size() || semi_b.size() != path.size() ||
      segments < 3) {
    throw std::invalid_argument("tube needs >= 2 path points, matching radii, >= 3 segments");
  }
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  const auto n = path.size();
  const auto seg = static_cast<std::uint32_t>(segments);

  Vec3 u;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 t = (i + 1 < n ? path[i + 1] - path[i] : path[i] - path[i - 1]).normalized();
    if (i == 0) {
      const Vec3 ref = std::abs(t.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      u = ref.cross(t).normalized();
    } else {
      // Parallel transport keeps the rings from twisting.
      u = (u - u.dot(t) * t).normalized();
    }
    const Vec3 v = t.cross(u);
    for (int k = 0; k < segments; ++k) {
      const double th = 2.0 * kPi * k / segments;
      vertices.push_back(path[i] + semi_a[i] * std::cos(th) * u + semi_b[i] * std::sin(th) * v);
    }
  }
  const auto ring = [seg](std::size_t i, std::uint32_t k) {
    return static_cast<std::uint32_t>(i * seg + k % seg);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::uint32_t k = 0; k < seg; ++k) {
      faces.push_back({ring(i, k), ring(i, k + 1), ring(i + 1, k + 1)});
      faces.push_back({ring(i, k), ring(i + 1, k + 1), ring(i + 1, k)});
    }
  }
  const auto start = static_cast<std::uint32_t>(vertices.size());
  vertices.push_back(path.front());
  vertices.push_back(path.back());
  for (std::uint32_t k = 0; k < seg; ++k) {
    faces.push_back({start, ring(0, k + 1), ring(0, k)});
    faces.push_back({start + 1, ring(n - 1, k), ring(n - 1, k + 1)});
  }
  return TriangleMesh(std::move(vertices), std::move(faces));
}

TriangleMesh make_hand(const Vec3& offset) {
  TriangleMesh hand;
  auto add_tube = [&](std::vector<Vec3> knots, double a, double b, int per_span, int segments) {
    for (auto& k : knots) k += offset;
    const auto path = refine(knots, per_span);
    // Slight taper toward the tip.
    std::vector<double> sa, sb;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const double taper = 1.0 - 0.25 * double(i) / double(path.size() - 1);
      sa.push_back(a * taper);
      sb.push_back(b * taper);
    }
    hand.append(make_tube(path, sa, sb, segments));
  };

  // Palm: flattened tube along +y, wide in x, thin in z.
  {
    std::vector<Vec3> path;
    for (int i = 0; i <= 7; ++i) path.emplace_back(0.0, -0.065 + 0.09 * i / 7.0, 0.30);
    std::vector<double> a(path.size(), 0.040), b(path.size(), 0.0125);
    for (auto& p : path) p += offset;
    hand.append(make_tube(path, a, b, 16));
  }
  // Extended middle, ring and little fingers.
  add_tube({{0.010, 0.020, 0.300}, {0.011, 0.048, 0.301}, {0.012, 0.072, 0.302}, {0.013, 0.092, 0.303}},
           0.0085, 0.0080, 2, 12);
  add_tube({{-0.010, 0.020, 0.300}, {-0.012, 0.046, 0.301}, {-0.014, 0.068, 0.302}, {-0.016, 0.086, 0.303}},
           0.0080, 0.0075, 2, 12);
  add_tube({{-0.030, 0.015, 0.300}, {-0.035, 0.036, 0.301}, {-0.039, 0.054, 0.302}, {-0.042, 0.068, 0.303}},
           0.0070, 0.0065, 2, 12);
  // Index finger curled toward the array to meet the thumb tip.
  add_tube({{0.030, 0.020, 0.298}, {0.033, 0.046, 0.290}, {0.036, 0.058, 0.274}, {0.038, 0.050, 0.262}},
           0.0085, 0.0080, 2, 12);
  // Thumb from the palm edge toward the index tip.
  add_tube({{0.040, -0.035, 0.296}, {0.058, -0.010, 0.288}, {0.056, 0.020, 0.276}, {0.045, 0.042, 0.266}},
           0.0095, 0.0090, 2, 12);
  return hand;
}

}  // namespace handray
