#include "handray/material.hpp"

#include <cmath>
#include <stdexcept>

namespace handray {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kMinBlendNorm = 1e-6;

}  // namespace

void MaterialParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

Vec3 sample_unit_sphere(CounterRng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = kTwoPi * rng.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Vec3 sample_diffuse(const Vec3& normal, CounterRng& rng) {
  for (;;) {
    const Vec3 v = normal + sample_unit_sphere(rng);
    const double len = v.norm();
    // Antipodal draws leave no usable direction.
    if (len >= kMinBlendNorm) return v / len;
  }
}

Vec3 reflect_specular(const Vec3& incident, const Vec3& normal) {
  return incident - 2.0 * incident.dot(normal) * normal;
}

bool blend_directions(const Vec3& diffuse, const Vec3& specular, const Vec3& normal, double alpha,
                      Vec3& out) {
  const Vec3 v = alpha * diffuse + (1.0 - alpha) * specular;
  const double len = v.norm();
  if (len < kMinBlendNorm) return false;
  out = v / len;
  return out.dot(normal) > 0.0;
}

ScatterSample scatter(const Vec3& incident, const Vec3& normal, const MaterialParams& params,
                      CounterRng& rng) {
  const Vec3 specular = reflect_specular(incident, normal);
  if (params.alpha <= 0.0) return {specular};
  for (int attempt = 0; attempt < kScatterRetries; ++attempt) {
    const Vec3 diffuse = sample_diffuse(normal, rng);
    if (params.alpha >= 1.0) return {diffuse};
    Vec3 out;
    if (blend_directions(diffuse, specular, normal, params.alpha, out)) return {out};
  }
  return {specular};
}

}  // namespace handray
