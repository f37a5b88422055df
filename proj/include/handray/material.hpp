#pragma once

#include "handray/geometry.hpp"
#include "handray/rng.hpp"

namespace handray {

/// Diffuse/specular mixing weight: 0 is a perfect mirror, 1 is Lambertian.
struct MaterialParams {
  double alpha = 0.0;

  /// Throws std::invalid_argument unless alpha lies in [0, 1].
  void validate() const;
};

struct ScatterSample {
  Vec3 outgoing;
};

/// Uniform point on the unit sphere.
Vec3 sample_unit_sphere(CounterRng& rng);

/// normalize(normal + r) with r uniform on the unit sphere, giving a
/// cosine-weighted direction about `normal`.
Vec3 sample_diffuse(const Vec3& normal, CounterRng& rng);

/// Mirror law: incident - 2 (incident . normal) normal.
Vec3 reflect_specular(const Vec3& incident, const Vec3& normal);

/// normalize(alpha * diffuse + (1 - alpha) * specular). Returns false when the
/// blend is shorter than 1e-6 or does not leave the surface.
bool blend_directions(const Vec3& diffuse, const Vec3& specular, const Vec3& normal, double alpha,
                      Vec3& out);

/// Outgoing direction for a ray arriving along `incident` at a surface whose
/// normal faces the incoming ray. Invalid blends redraw the diffuse term up to
/// kScatterRetries times and then fall back to the mirror direction. alpha = 0
/// consumes no random numbers.
ScatterSample scatter(const Vec3& incident, const Vec3& normal, const MaterialParams& params,
                      CounterRng& rng);

inline constexpr int kScatterRetries = 16;

}  // namespace handray
