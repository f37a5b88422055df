#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace handray {

using Vec3 = Eigen::Vector3d;

/// Similarity transform applied to mesh vertices on load: p' = R * (s * p) + t.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  static RigidTransform identity() { return {}; }

  /// Rotation built from intrinsic x, then y, then z angles in degrees.
  static RigidTransform from_euler_deg(const Vec3& angles_deg, const Vec3& translation,
                                       double scale);

  Vec3 apply(const Vec3& p) const { return rotation * (scale * p) + translation; }

  /// Throws std::invalid_argument unless rotation is orthonormal with det +1 and scale > 0.
  void validate() const;
};

}  // namespace handray
