#pragma once

#include <span>

#include "sulreg/types.hpp"

namespace sulreg {

/// Exact k-nearest-neighbor kd-tree over a fixed point set.
///
/// Results are ordered by ascending Euclidean distance; equal distances are
/// ordered by ascending point index, so queries are reproducible. The index
/// owns a copy of the points and is immutable after construction, so
/// concurrent queries are safe.
class SpatialIndex {
 public:
  /// Throws EmptyCloud for an empty cloud.
  explicit SpatialIndex(std::span<const Vec3> points, std::size_t leaf_size = 8);

  std::vector<Index> knn(const Vec3& query, std::size_t k) const;

  const PointCloud& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    // Leaf: [begin, end) into order_. Inner: children and split plane.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = 0;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  PointCloud points_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

inline SpatialIndex build_index(std::span<const Vec3> cloud) { return SpatialIndex(cloud); }

inline std::vector<Index> knn(const SpatialIndex& index, const Vec3& query, std::size_t k) {
  return index.knn(query, k);
}

}  // namespace sulreg
