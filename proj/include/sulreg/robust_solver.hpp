#pragma once

#include <span>

#include "sulreg/types.hpp"

namespace sulreg {

struct GncConfig {
  double noise_bound = 0.05;      // tau, scene units
  double mu_update_factor = 1.4;  // > 1
  int max_iterations = 100;
  double convergence_tol = 1e-6;  // on the summed absolute weight change

  void validate() const;
};

struct GncResult {
  Mat3 rotation = Mat3::Identity();
  std::vector<double> weights;           // final TLS weights, each in [0, 1]
  bool converged = false;
  int iterations = 0;
  std::vector<double> accepted_objective;  // TLS cost of each accepted (improving) iterate
  double objective = 0.0;
  // Extremes of the surrogate weights at each reweighting step.
  std::vector<double> min_weight_trace;
  std::vector<double> max_weight_trace;
};

/// True when the source directions span fewer than two dimensions.
bool all_source_vectors_parallel(std::span<const LineVector> lvs);

/// Truncated least-squares cost sum min(|R a - b|^2, tau^2).
double tls_objective(const Mat3& r, std::span<const LineVector> lvs, double noise_bound);

/// Robust rotation from line vectors by graduated non-convexity over a
/// truncated least-squares loss: iteratively reweighted rotation fits with
/// the continuation parameter grown by mu_update_factor. The continuation
/// starts from the largest residual under `initial`. Returns the iterate
/// with the lowest TLS cost, always a proper rotation. Throws
/// DegenerateInput when fewer than two vectors are given or all source
/// vectors are parallel.
GncResult estimate_rotation_gnc(std::span<const LineVector> lvs, const GncConfig& cfg,
                                const Mat3& initial = Mat3::Identity());

/// Component-wise median of y_i - R x_i (mean of the middle pair for even
/// counts). Throws InvalidArgument when empty.
Vec3 estimate_translation(std::span<const Correspondence> corrs, const Mat3& rotation);

/// Overload over a subset of a correspondence set.
Vec3 estimate_translation(const CorrespondenceSet& corrs, std::span<const Index> members,
                          const Mat3& rotation);

struct LocalEstimate {
  RigidTransform transform;
  bool converged = false;
  std::size_t translation_support = 0;  // correspondences the median ran over
};

/// Rotation from estimate_rotation_gnc on the basic line vectors;
/// translation is the median over the endpoints of the line vectors the GNC
/// kept (final weight >= 0.5), or over all endpoints when it kept none.
/// Line-vector indices refer to `corrs`.
LocalEstimate estimate_local_transform(std::span<const LineVector> basic_lvs,
                                       const CorrespondenceSet& corrs, const GncConfig& cfg,
                                       const Mat3& initial_rotation = Mat3::Identity());

}  // namespace sulreg
