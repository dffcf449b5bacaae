#pragma once

#include <span>

#include "sulreg/spatial_index.hpp"
#include "sulreg/types.hpp"

namespace sulreg {

inline constexpr std::size_t kDefaultNormalNeighbors = 20;

/// Smallest-eigenvalue eigenvector of the neighborhood covariance, with the
/// largest-magnitude component made positive. Throws DegenerateNeighborhood
/// when all neighbors coincide.
Vec3 normal_from_neighborhood(std::span<const Vec3> neighborhood);

/// PCA normal of the k nearest neighbors of `point` (the point itself is
/// part of its neighborhood when it belongs to the indexed cloud).
Vec3 estimate_normal(const SpatialIndex& index, const Vec3& point,
                     std::size_t k = kDefaultNormalNeighbors);

/// Fills source_normal / target_normal of every correspondence. On failure
/// the DegenerateNeighborhood error names the offending correspondence.
void annotate_normals(CorrespondenceSet& corrs, std::span<const Vec3> source_cloud,
                      std::span<const Vec3> target_cloud,
                      std::size_t k = kDefaultNormalNeighbors);

/// Largest-magnitude component positive (first index wins ties).
Vec3 canonicalize_sign(const Vec3& n);

}  // namespace sulreg
