#pragma once

// Data-parallel inner loops of the registration pipeline. Every kernel has
// an OpenMP version (namespace kernels) and a serial reference
// (namespace kernels::serial) producing bit-identical output; the tests
// compare the two and bench/kernels_bench.cpp times them.
//
// No kernel performs a cross-thread floating-point reduction, so results do
// not depend on the thread count.

#include <optional>
#include <span>

#include "sulreg/spatial_index.hpp"
#include "sulreg/types.hpp"

namespace sulreg::kernels {

struct PairVectors {
  LineVectorSet vectors;   // lexicographic (i, j) order
  std::size_t skipped = 0; // pairs with a zero-length source or target vector
};

/// residuals[i] = |R x_i + T - y_i|
std::vector<double> compute_residuals(const RigidTransform& t, const CorrespondenceSet& corrs);

/// Normal per query point; std::nullopt where the neighborhood is degenerate.
std::vector<std::optional<Vec3>> estimate_normals(const SpatialIndex& index,
                                                  std::span<const Vec3> queries, std::size_t k);

/// All pairs (members[a], members[b]), a < b, of the given correspondences.
/// `members` must be ascending.
PairVectors build_pair_vectors(const CorrespondenceSet& corrs, std::span<const Index> members);

/// Count of residuals strictly below threshold.
std::size_t count_below(std::span<const double> values, double threshold);

namespace serial {

std::vector<double> compute_residuals(const RigidTransform& t, const CorrespondenceSet& corrs);
std::vector<std::optional<Vec3>> estimate_normals(const SpatialIndex& index,
                                                  std::span<const Vec3> queries, std::size_t k);
PairVectors build_pair_vectors(const CorrespondenceSet& corrs, std::span<const Index> members);
std::size_t count_below(std::span<const double> values, double threshold);

}  // namespace serial

/// Builds one line vector; std::nullopt when either difference is zero.
std::optional<LineVector> make_line_vector(const CorrespondenceSet& corrs, Index a, Index b);

}  // namespace sulreg::kernels
