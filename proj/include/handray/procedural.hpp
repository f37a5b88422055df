#pragma once

#include <span>

#include "handray/scene.hpp"

namespace handray {

/// Rectangular plate of width x height meters split into cells x cells quads,
/// centered at `center`, facing -z, then rotated `tilt_deg` about the x axis
/// through its center.
TriangleMesh make_plate(double width, double height, int cells, const Vec3& center,
                        double tilt_deg = 0.0);

/// Axis-aligned box with outward normals: 8 vertices, 12 faces.
TriangleMesh make_box(const Vec3& center, const Vec3& size);

/// Closed tube along a polyline with elliptical cross-section (semi-axes per
/// path point), capped at both ends.
TriangleMesh make_tube(std::span<const Vec3> path, std::span<const double> semi_a,
                       std::span<const double> semi_b, int segments);

/// Low-resolution articulated hand at roughly 30 cm in front of an array at
/// z = 0, palm facing -z: a flattened palm, three extended fingers, and the
/// index finger curled to meet the thumb. About 1100 faces.
TriangleMesh make_hand(const Vec3& offset = Vec3::Zero());

}  // namespace handray
