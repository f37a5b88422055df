#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "handray/geometry.hpp"
#include "handray/rng.hpp"

namespace handray {

/// Minimum accepted hit distance in meters. Keeps rays leaving a surface from
/// re-hitting it.
inline constexpr double kIntersectionEpsilon = 1e-6;

/// Faces with area below this (m^2) are rejected.
inline constexpr double kMinFaceArea = 1e-12;

class MeshParseError : public std::runtime_error {
 public:
  MeshParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DegenerateFaceError : public std::runtime_error {
 public:
  explicit DegenerateFaceError(std::vector<std::size_t> faces);
  const std::vector<std::size_t>& faces() const { return faces_; }

 private:
  std::vector<std::size_t> faces_;
};

using Face = std::array<std::uint32_t, 3>;

/// Triangle soup with flat per-face unit normals computed from the winding
/// (counter-clockwise faces point toward the viewer). Each face carries a
/// group id so several meshes can share one scene with different materials.
class TriangleMesh {
 public:
  TriangleMesh() = default;

  /// Validates indices and areas, then computes normals. Throws
  /// std::out_of_range for bad indices and DegenerateFaceError for zero-area faces.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::uint32_t group = 0);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& face_normals() const { return normals_; }
  const std::vector<std::uint32_t>& face_groups() const { return groups_; }

  std::size_t num_faces() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }

  const Vec3& vertex(std::size_t face, int corner) const { return vertices_[faces_[face][corner]]; }
  double face_area(std::size_t face) const;
  double total_area() const;

  /// Appends another mesh; its faces keep their own group ids.
  void append(const TriangleMesh& other);

  /// Returns a copy with every face assigned to `group`.
  TriangleMesh with_group(std::uint32_t group) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<Vec3> normals_;
  std::vector<std::uint32_t> groups_;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

struct Hit {
  std::uint32_t face_id = 0;
  Vec3 point;
  double distance = 0.0;
  Vec3 normal;  // faces the incoming ray
};

/// Parses OBJ text: `v x y z` and `f a b c ...` records (1-based or negative
/// indices, `a/b/c` forms accepted, polygons fan-triangulated). Everything else
/// is ignored.
TriangleMesh parse_obj(std::istream& in, const RigidTransform& transform = {});

TriangleMesh load_mesh(const std::filesystem::path& path, const RigidTransform& transform = {});

void write_obj(std::ostream& out, const TriangleMesh& mesh);

/// Bounding volume hierarchy over a mesh. Immutable after construction; queries
/// are safe from any number of threads. Keeps a copy of the mesh.
class AccelStructure {
 public:
  struct Node {
    Eigen::AlignedBox3d bounds;
    std::uint32_t first = 0;  // first child (inner) or first primitive slot (leaf)
    std::uint32_t count = 0;  // 0 for inner nodes
  };

  AccelStructure() = default;
  explicit AccelStructure(TriangleMesh mesh);

  const TriangleMesh& mesh() const { return mesh_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;

  /// Nearest hit with distance in (max(t_min, epsilon), t_max]. Ties resolve to
  /// the lowest face id.
  std::optional<Hit> intersect(const Ray& ray, double t_min, double t_max) const;

  /// True iff some face crosses the open segment (a + eps*dir, b - eps*dir).
  bool occluded(const Vec3& a, const Vec3& b) const;

 private:
  void build();

  TriangleMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;  // primitive slots -> face ids
};

AccelStructure build_accel(TriangleMesh mesh);

inline std::optional<Hit> intersect(const AccelStructure& accel, const Ray& ray, double t_min,
                                    double t_max) {
  return accel.intersect(ray, t_min, t_max);
}

inline bool occluded(const AccelStructure& accel, const Vec3& a, const Vec3& b) {
  return accel.occluded(a, b);
}

/// Ray/triangle distance (Moller-Trumbore), or nullopt when the ray misses or
/// runs parallel to the plane.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2);

/// One uniformly distributed point on a face.
Vec3 sample_triangle_point(const TriangleMesh& mesh, std::size_t face_id, CounterRng& rng);

std::vector<Vec3> sample_triangle_points(const TriangleMesh& mesh, std::size_t face_id,
                                         std::size_t count, CounterRng& rng);

}  // namespace handray
