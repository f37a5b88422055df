#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "handray/scene.hpp"

namespace handray {

namespace {

constexpr std::uint32_t kMaxLeafSize = 4;
constexpr int kBins = 12;
// Beyond this depth only median splits are used, bounding the traversal stack.
constexpr std::uint32_t kMaxSahDepth = 40;
constexpr std::size_t kStackSize = 128;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct BuildItem {
  Eigen::AlignedBox3d bounds;
  Vec3 centroid;
};

double surface_area(const Eigen::AlignedBox3d& box) {
  if (box.isEmpty()) return 0.0;
  const Vec3 d = box.sizes();
  return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
}

// Slab test against [t_min, t_max]; on a hit stores the entry distance.
bool box_entry(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir,
               double t_min, double t_max, double& entry) {
  for (int axis = 0; axis < 3; ++axis) {
    double t0 = (box.min()[axis] - origin[axis]) * inv_dir[axis];
    double t1 = (box.max()[axis] - origin[axis]) * inv_dir[axis];
    if (std::isnan(t0) || std::isnan(t1)) {
      // Ray lies in a slab boundary plane with zero direction component.
      if (origin[axis] < box.min()[axis] || origin[axis] > box.max()[axis]) return false;
      continue;
    }
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  entry = t_min;
  return true;
}

}  // namespace

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  const double scale = e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = ray.origin - v0;
  const double u = s.dot(p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return e2.dot(q) * inv_det;
}

AccelStructure::AccelStructure(TriangleMesh mesh) : mesh_(std::move(mesh)) { build(); }

AccelStructure build_accel(TriangleMesh mesh) { return AccelStructure(std::move(mesh)); }

std::size_t AccelStructure::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
}

void AccelStructure::build() {
  const std::size_t n = mesh_.num_faces();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.clear();
  if (n == 0) return;

  std::vector<BuildItem> items(n);
  for (std::size_t f = 0; f < n; ++f) {
    Eigen::AlignedBox3d box(mesh_.vertex(f, 0));
    box.extend(mesh_.vertex(f, 1));
    box.extend(mesh_.vertex(f, 2));
    items[f] = {box, box.center()};
  }

  struct Task {
    std::uint32_t node, begin, end, depth;
  };
  nodes_.reserve(2 * n);
  nodes_.push_back({});
  std::vector<Task> stack{{0, 0, static_cast<std::uint32_t>(n), 0}};

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();

    Eigen::AlignedBox3d bounds;
    Eigen::AlignedBox3d centroid_bounds;
    for (std::uint32_t i = task.begin; i < task.end; ++i) {
      bounds.extend(items[order_[i]].bounds);
      centroid_bounds.extend(items[order_[i]].centroid);
    }
    nodes_[task.node].bounds = bounds;
    const std::uint32_t count = task.end - task.begin;

    auto make_leaf = [&] {
      nodes_[task.node].first = task.begin;
      nodes_[task.node].count = count;
    };
    if (count <= kMaxLeafSize) {
      make_leaf();
      continue;
    }

    // Binned surface-area heuristic over the widest centroid axis.
    int axis = 0;
    centroid_bounds.sizes().maxCoeff(&axis);
    const double lo = centroid_bounds.min()[axis];
    const double extent = centroid_bounds.max()[axis] - lo;
    std::uint32_t mid = task.begin + count / 2;
    bool partitioned = false;

    if (extent > 0.0 && task.depth < kMaxSahDepth) {
      std::array<Eigen::AlignedBox3d, kBins> bin_box;
      std::array<std::uint32_t, kBins> bin_count{};
      auto bin_of = [&](std::uint32_t face) {
        const int b = static_cast<int>(kBins * (items[face].centroid[axis] - lo) / extent);
        return std::clamp(b, 0, kBins - 1);
      };
      for (std::uint32_t i = task.begin; i < task.end; ++i) {
        const int b = bin_of(order_[i]);
        bin_box[b].extend(items[order_[i]].bounds);
        ++bin_count[b];
      }
      std::array<double, kBins - 1> left_cost{};
      Eigen::AlignedBox3d acc;
      std::uint32_t acc_n = 0;
      for (int b = 0; b < kBins - 1; ++b) {
        acc.extend(bin_box[b]);
        acc_n += bin_count[b];
        left_cost[b] = surface_area(acc) * acc_n;
      }
      acc.setEmpty();
      acc_n = 0;
      double best = kInf;
      int best_split = -1;
      for (int b = kBins - 1; b > 0; --b) {
        acc.extend(bin_box[b]);
        acc_n += bin_count[b];
        const double cost = left_cost[b - 1] + surface_area(acc) * acc_n;
        if (acc_n > 0 && acc_n < count && cost < best) {
          best = cost;
          best_split = b;
        }
      }
      if (best_split > 0) {
        const auto it = std::partition(order_.begin() + task.begin, order_.begin() + task.end,
                                       [&](std::uint32_t face) { return bin_of(face) < best_split; });
        mid = static_cast<std::uint32_t>(it - order_.begin());
        partitioned = true;
      }
    }
    if (!partitioned && extent > 0.0) {
      std::nth_element(order_.begin() + task.begin, order_.begin() + mid, order_.begin() + task.end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         return items[a].centroid[axis] < items[b].centroid[axis];
                       });
    }
    // All centroids coincide: the index split above stands.

    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[task.node].first = left;
    nodes_[task.node].count = 0;
    stack.push_back({left + 1, mid, task.end, task.depth + 1});
    stack.push_back({left, task.begin, mid, task.depth + 1});
  }
}

std::optional<Hit> AccelStructure::intersect(const Ray& ray, double t_min, double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  t_min = std::max(t_min, kIntersectionEpsilon);
  if (!(t_max > t_min)) return std::nullopt;

  const Vec3 inv_dir = ray.direction.cwiseInverse();
  double best_t = kInf;
  std::uint32_t best_face = std::numeric_limits<std::uint32_t>::max();

  std::array<std::uint32_t, kStackSize> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    const double limit = std::min(t_max, best_t);
    // Ties at equal distance must still be visited so the lowest face id wins.
    double entry = 0.0;
    if (!box_entry(node.bounds, ray.origin, inv_dir, t_min, limit, entry)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t face = order_[i];
        const auto t = intersect_triangle(ray, mesh_.vertex(face, 0), mesh_.vertex(face, 1),
                                          mesh_.vertex(face, 2));
        if (!t || !(*t > t_min) || *t > t_max) continue;
        if (*t < best_t || (*t == best_t && face < best_face)) {
          best_t = *t;
          best_face = face;
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const std::uint32_t a = node.first;
    const std::uint32_t b = node.first + 1;
    double ta = kInf;
    double tb = kInf;
    const bool hit_a = box_entry(nodes_[a].bounds, ray.origin, inv_dir, t_min, limit, ta);
    const bool hit_b = box_entry(nodes_[b].bounds, ray.origin, inv_dir, t_min, limit, tb);
    const bool a_first = ta <= tb;
    const std::uint32_t near = a_first ? a : b;
    const std::uint32_t far = a_first ? b : a;
    if (a_first ? hit_b : hit_a) stack[top++] = far;
    if (a_first ? hit_a : hit_b) stack[top++] = near;
  }
  if (best_face == std::numeric_limits<std::uint32_t>::max()) return std::nullopt;

  Hit hit;
  hit.face_id = best_face;
  hit.distance = best_t;
  hit.point = ray.origin + best_t * ray.direction;
  const Vec3& n = mesh_.face_normals()[best_face];
  hit.normal = n.dot(ray.direction) < 0.0 ? n : Vec3(-n);
  return hit;
}

bool AccelStructure::occluded(const Vec3& a, const Vec3& b) const {
  if (nodes_.empty()) return false;
  const Vec3 delta = b - a;
  const double length = delta.norm();
  if (!(length > 2.0 * kIntersectionEpsilon)) return false;
  const Ray ray{a, delta / length};
  const double t_min = kIntersectionEpsilon;
  const double t_max = length - kIntersectionEpsilon;
  const Vec3 inv_dir = ray.direction.cwiseInverse();

  std::array<std::uint32_t, kStackSize> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    double entry = 0.0;
    if (!box_entry(node.bounds, ray.origin, inv_dir, t_min, t_max, entry)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t face = order_[i];
        const auto t = intersect_triangle(ray, mesh_.vertex(face, 0), mesh_.vertex(face, 1),
                                          mesh_.vertex(face, 2));
        if (t && *t > t_min && *t < t_max) return true;
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = node.first + 1;
  }
  return false;
}

}  // namespace handray
