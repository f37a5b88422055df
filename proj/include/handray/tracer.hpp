#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "handray/material.hpp"
#include "handray/rfconfig.hpp"
#include "handray/scene.hpp"

namespace handray {

enum class RayBudget {
  kFixed,         // rays_per_triangle rays for every face
  kAreaWeighted,  // same total, distributed proportionally to face area (>= 1 per face)
};

struct TraceConfig {
  int rays_per_triangle = 32;
  RayBudget budget = RayBudget::kFixed;
  int max_bounces = 3;
  double rx_radius = 2e-3;
  std::uint64_t master_seed = 1;

  void validate() const;
};

/// One received ray path.
struct PathRecord {
  std::uint32_t tx = 0;
  std::uint32_t rx = 0;
  double length_d = 0.0;  // Tx -> surfaces -> Rx, meters
  std::uint32_t bounces = 0;

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

/// Total order used for every record list: (tx, rx, length, bounces).
bool record_less(const PathRecord& a, const PathRecord& b);

/// Material per face group. Groups without an entry use `fallback`.
struct MaterialMap {
  MaterialParams fallback;
  std::vector<std::optional<MaterialParams>> per_group;

  const MaterialParams& lookup(std::uint32_t group) const {
    if (group < per_group.size() && per_group[group]) return *per_group[group];
    return fallback;
  }
  void validate() const;
};

struct RxCapture {
  std::uint32_t rx = 0;
  double length = 0.0;  // interaction point to Rx center
};

/// Rx antennas captured by the segment leaving `origin` along `direction`
/// (unit) for `extent` meters (may be infinite). An Rx counts when its
/// perpendicular distance to the line is <= rx_radius, its closest-approach
/// parameter lies in [0, extent], and the straight path origin -> Rx is not
/// occluded.
std::vector<RxCapture> capture_rx(const Vec3& origin, const Vec3& direction, double extent,
                                  const ArrayGeometry& array, const AccelStructure& scene,
                                  double rx_radius);

/// Per-face primary ray counts for the configured budget.
std::vector<int> rays_per_face(const TriangleMesh& mesh, const TraceConfig& config);

/// Records for one transmitter, sorted with record_less.
///
/// For every face visible from the Tx, rays aim at uniform sample points on
/// that face. Each surface interaction draws a new direction from the material
/// model and tests the outgoing segment for Rx capture. Each ray owns the
/// random stream stream_key(master_seed, tx, face, ray).
std::vector<PathRecord> trace_tx(const AccelStructure& scene, const ArrayGeometry& array,
                                 const MaterialMap& materials, const TraceConfig& config,
                                 std::uint32_t tx);

/// Records for all transmitters in `tx_order` (default: all, ascending),
/// globally sorted. Work is split over (tx, face) units across `threads`
/// workers; the result is bit-identical for any thread count or order.
std::vector<PathRecord> trace_all(const AccelStructure& scene, const ArrayGeometry& array,
                                  const MaterialMap& materials, const TraceConfig& config,
                                  unsigned threads = 0,
                                  std::span<const std::uint32_t> tx_order = {});

/// Path-record dumps. Text: one `tx rx length_d bounces` line per record.
/// Binary: packed little-endian u32 tx, u32 rx, f64 length_d, u32 bounces.
void write_records_text(std::ostream& out, std::span<const PathRecord> records);
void write_records_binary(std::ostream& out, std::span<const PathRecord> records);
std::vector<PathRecord> read_records_text(std::istream& in);
std::vector<PathRecord> read_records_binary(std::istream& in);

void save_records(const std::filesystem::path& path, std::span<const PathRecord> records);
std::vector<PathRecord> load_records(const std::filesystem::path& path);

}  // namespace handray
