#include "handray/scene.hpp"

#include <cmath>
#include <sstream>

namespace handray {

RigidTransform RigidTransform::from_euler_deg(const Vec3& angles_deg, const Vec3& translation,
                                              double scale) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  RigidTransform t;
  t.rotation = (Eigen::AngleAxisd(angles_deg.z() * kDeg, Vec3::UnitZ()) *
                Eigen::AngleAxisd(angles_deg.y() * kDeg, Vec3::UnitY()) *
                Eigen::AngleAxisd(angles_deg.x() * kDeg, Vec3::UnitX()))
                   .toRotationMatrix();
  t.translation = translation;
  t.scale = scale;
  return t;
}

void RigidTransform::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("transform scale must be positive and finite");
  }
  if (!translation.allFinite()) throw std::invalid_argument("transform translation not finite");
  const double ortho = (rotation * rotation.transpose() - Eigen::Matrix3d::Identity()).norm();
  if (!(ortho < 1e-9) || !(std::abs(rotation.determinant() - 1.0) < 1e-9)) {
    throw std::invalid_argument("transform rotation is not a proper rotation");
  }
}

namespace {

std::string describe_faces(const std::vector<std::size_t>& faces) {
  std::ostringstream os;
  os << "degenerate faces (area < " << kMinFaceArea << " m^2):";
  for (std::size_t i = 0; i < faces.size() && i < 32; ++i) os << ' ' << faces[i];
  if (faces.size() > 32) os << " ... (" << faces.size() << " total)";
  return os.str();
}

}  // namespace

DegenerateFaceError::DegenerateFaceError(std::vector<std::size_t> faces)
    : std::runtime_error(describe_faces(faces)), faces_(std::move(faces)) {}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                           std::uint32_t group)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw std::invalid_argument("mesh vertex is not finite");
  }
  std::vector<std::size_t> degenerate;
  normals_.reserve(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (auto idx : faces_[f]) {
      if (idx >= vertices_.size()) {
        throw std::out_of_range("face " + std::to_string(f) + " references vertex " +
                                std::to_string(idx) + " of " + std::to_string(vertices_.size()));
      }
    }
    const Vec3 cross = (vertex(f, 1) - vertex(f, 0)).cross(vertex(f, 2) - vertex(f, 0));
    const double twice_area = cross.norm();
    if (!(0.5 * twice_area >= kMinFaceArea)) {
      degenerate.push_back(f);
      normals_.push_back(Vec3::UnitZ());
      continue;
    }
    normals_.push_back(cross / twice_area);
  }
  if (!degenerate.empty()) throw DegenerateFaceError(std::move(degenerate));
  groups_.assign(faces_.size(), group);
}

double TriangleMesh::face_area(std::size_t face) const {
  return 0.5 * (vertex(face, 1) - vertex(face, 0)).cross(vertex(face, 2) - vertex(face, 0)).norm();
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f) sum += face_area(f);
  return sum;
}

void TriangleMesh::append(const TriangleMesh& other) {
  const auto offset = static_cast<std::uint32_t>(vertices_.size());
  vertices_.insert(vertices_.end(), other.vertices_.begin(), other.vertices_.end());
  for (const auto& f : other.faces_) faces_.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  normals_.insert(normals_.end(), other.normals_.begin(), other.normals_.end());
  groups_.insert(groups_.end(), other.groups_.begin(), other.groups_.end());
}

TriangleMesh TriangleMesh::with_group(std::uint32_t group) const {
  TriangleMesh copy = *this;
  copy.groups_.assign(copy.faces_.size(), group);
  return copy;
}

Vec3 sample_triangle_point(const TriangleMesh& mesh, std::size_t face_id, CounterRng& rng) {
  // Square-root parameterization maps the unit square uniformly onto the triangle.
  const double s = std::sqrt(rng.uniform());
  const double r2 = rng.uniform();
  const double b0 = 1.0 - s;
  const double b1 = s * (1.0 - r2);
  const double b2 = s * r2;
  return b0 * mesh.vertex(face_id, 0) + b1 * mesh.vertex(face_id, 1) +
         b2 * mesh.vertex(face_id, 2);
}

std::vector<Vec3> sample_triangle_points(const TriangleMesh& mesh, std::size_t face_id,
                                         std::size_t count, CounterRng& rng) {
  if (face_id >= mesh.num_faces()) throw std::out_of_range("face id out of range");
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  std::vector<Vec3> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) points.push_back(sample_triangle_point(mesh, face_id, rng));
  return points;
}

}  // namespace handray
