#pragma once

#include <string_view>

#include "sulreg/types.hpp"

namespace sulreg {

enum class SurfaceModel { RandomBlobs, MultiPlane };

SurfaceModel parse_surface_model(std::string_view s);
const char* to_string(SurfaceModel m);

/// Parameters of a synthetic registration problem with known ground truth.
struct SyntheticSpec {
  std::size_t n_points = 1000;
  std::size_t n_correspondences = 200;
  double outlier_rate = 0.0;             // [0, 1)
  double noise_sigma = 0.0;              // per-axis Gaussian noise on the target cloud
  double rotation_magnitude_deg = 15.0;  // exact angle about a random axis
  double translation_magnitude = 0.5;    // exact length in a random direction
  double scene_extent = 1.0;             // points lie in a cube of this edge
  SurfaceModel surface_model = SurfaceModel::MultiPlane;
  double residual_threshold = 0.01;      // labels: inliers < T_r, outliers >= 3 T_r
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticPair {
  PointCloud source;
  PointCloud target;
  CorrespondenceSet corrs;
  RigidTransform gt;
  IndexSet true_inliers;  // positions in corrs, ascending
};

/// Deterministic in spec.seed. Inlier correspondences pair a source point
/// with its own noisy image (restricted to points whose noise keeps the
/// residual below T_r); outliers pair random points whose residual under the
/// ground truth is at least 3 T_r.
SyntheticPair synthesize_pair(const SyntheticSpec& spec);

}  // namespace sulreg
