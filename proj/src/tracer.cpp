#include "handray/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "handray/parallel.hpp"

namespace handray {

void TraceConfig::validate() const {
  if (rays_per_triangle < 1) throw std::invalid_argument("rays_per_triangle must be >= 1");
  if (max_bounces < 1) throw std::invalid_argument("max_bounces must be >= 1");
  if (!(rx_radius > 0.0) || !std::isfinite(rx_radius)) {
    throw std::invalid_argument("rx_radius must be positive");
  }
}

void MaterialMap::validate() const {
  fallback.validate();
  for (const auto& m : per_group) {
    if (m) m->validate();
  }
}

bool record_less(const PathRecord& a, const PathRecord& b) {
  if (a.tx != b.tx) return a.tx < b.tx;
  if (a.rx != b.rx) return a.rx < b.rx;
  if (a.length_d != b.length_d) return a.length_d < b.length_d;
  return a.bounces < b.bounces;
}

std::vector<RxCapture> capture_rx(const Vec3& origin, const Vec3& direction, double extent,
                                  const ArrayGeometry& array, const AccelStructure& scene,
                                  double rx_radius) {
  std::vector<RxCapture> captures;
  const double r2 = rx_radius * rx_radius;
  for (std::size_t i = 0; i < array.num_rx(); ++i) {
    const Vec3 w = array.rx()[i] - origin;
    const double along = w.dot(direction);
    if (along < 0.0 || along > extent) continue;
    const double dist2 = w.squaredNorm();
    if (dist2 - along * along > r2) continue;
    if (scene.occluded(origin, array.rx()[i])) continue;
    captures.push_back({static_cast<std::uint32_t>(i), std::sqrt(dist2)});
  }
  return captures;
}

std::vector<int> rays_per_face(const TriangleMesh& mesh, const TraceConfig& config) {
  std::vector<int> counts(mesh.num_faces(), config.rays_per_triangle);
  if (config.budget == RayBudget::kAreaWeighted && !mesh.empty()) {
    const double total = static_cast<double>(config.rays_per_triangle) * mesh.num_faces();
    const double area = mesh.total_area();
    for (std::size_t f = 0; f < counts.size(); ++f) {
      counts[f] = std::max(1, static_cast<int>(std::llround(total * mesh.face_area(f) / area)));
    }
  }
  return counts;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Traces every primary ray from one Tx toward one face and appends receptions.
void trace_unit(const AccelStructure& scene, const ArrayGeometry& array,
                const MaterialMap& materials, const TraceConfig& config, std::uint32_t tx,
                std::uint32_t face, int ray_count, std::vector<PathRecord>& out) {
  const TriangleMesh& mesh = scene.mesh();
  const Vec3& tx_pos = array.tx()[tx];
  // Backfacing (or edge-on) faces get no primary rays.
  if (mesh.face_normals()[face].dot(mesh.vertex(face, 0) - tx_pos) >= 0.0) return;

  for (int k = 0; k < ray_count; ++k) {
    CounterRng rng(stream_key(config.master_seed, tx, face, static_cast<std::uint64_t>(k)));
    const Vec3 target = sample_triangle_point(mesh, face, rng);
    const Vec3 to_target = target - tx_pos;
    const double target_dist = to_target.norm();
    if (!(target_dist > kIntersectionEpsilon)) continue;
    Vec3 direction = to_target / target_dist;

    auto hit = scene.intersect(Ray{tx_pos, direction}, 0.0, kInf);
    if (!hit) continue;
    double travelled = hit->distance;

    for (int bounce = 1; bounce <= config.max_bounces; ++bounce) {
      const MaterialParams& material = materials.lookup(mesh.face_groups()[hit->face_id]);
      const Vec3 outgoing = scatter(direction, hit->normal, material, rng).outgoing;
      const auto next = scene.intersect(Ray{hit->point, outgoing}, kIntersectionEpsilon, kInf);
      const double extent = next ? next->distance : kInf;
      for (const auto& c :
           capture_rx(hit->point, outgoing, extent, array, scene, config.rx_radius)) {
        out.push_back({tx, c.rx, travelled + c.length, static_cast<std::uint32_t>(bounce)});
      }
      if (!next) break;
      travelled += next->distance;
      direction = outgoing;
      hit = next;
    }
  }
}

}  // namespace

std::vector<PathRecord> trace_tx(const AccelStructure& scene, const ArrayGeometry& array,
                                 const MaterialMap& materials, const TraceConfig& config,
                                 std::uint32_t tx) {
  const std::uint32_t order[] = {tx};
  return trace_all(scene, array, materials, config, 1, order);
}

std::vector<PathRecord> trace_all(const AccelStructure& scene, const ArrayGeometry& array,
                                  const MaterialMap& materials, const TraceConfig& config,
                                  unsigned threads, std::span<const std::uint32_t> tx_order) {
  config.validate();
  materials.validate();
  std::vector<std::uint32_t> txs(tx_order.begin(), tx_order.end());
  if (txs.empty()) {
    txs.resize(array.num_tx());
    std::iota(txs.begin(), txs.end(), 0u);
  }
  for (auto tx : txs) {
    if (tx >= array.num_tx()) throw std::out_of_range("tx index out of range");
  }

  const TriangleMesh& mesh = scene.mesh();
  const std::size_t n_faces = mesh.num_faces();
  if (n_faces == 0) return {};
  const std::vector<int> budget = rays_per_face(mesh, config);

  std::vector<std::vector<PathRecord>> buffers(txs.size() * n_faces);
  parallel_for(buffers.size(), threads, [&](std::size_t unit) {
    const auto tx = txs[unit / n_faces];
    const auto face = static_cast<std::uint32_t>(unit % n_faces);
    trace_unit(scene, array, materials, config, tx, face, budget[face], buffers[unit]);
  });

  std::size_t total = 0;
  for (const auto& b : buffers) total += b.size();
  std::vector<PathRecord> records;
  records.reserve(total);
  for (auto& b : buffers) records.insert(records.end(), b.begin(), b.end());
  std::sort(records.begin(), records.end(), record_less);
  return records;
}

}  // namespace handray
