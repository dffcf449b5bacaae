#pragma once

#include <span>

#include "sulreg/types.hpp"

namespace sulreg {

inline Vec3 apply_transform(const RigidTransform& t, const Vec3& p) { return t(p); }

/// Euclidean distance between the transformed source and the target.
double residual(const RigidTransform& t, const Correspondence& c);

/// Least-squares rigid fit minimizing sum w_i |R x_i + T - y_i|^2.
///
/// Reflections are corrected by flipping the singular vector of the
/// smallest singular value. Throws DegenerateInput when fewer than three
/// correspondences carry positive weight or the weighted cross-covariance
/// has rank < 2 (coincident or collinear points).
RigidTransform weighted_kabsch(std::span<const Vec3> source, std::span<const Vec3> target,
                               std::span<const double> weights);

RigidTransform weighted_kabsch(const CorrespondenceSet& corrs, std::span<const double> weights);

/// Rotation-only weighted fit of origin-anchored vector pairs (no centering):
/// argmin_R sum w_i |R a_i - b_i|^2. Throws DegenerateInput when the
/// weighted cross-covariance has rank < 2 (all vectors parallel).
Mat3 weighted_rotation_fit(std::span<const Vec3> from, std::span<const Vec3> to,
                           std::span<const double> weights);

/// Geodesic angle arccos((tr(r1 r2^T) - 1) / 2) in [0, pi].
double rotation_geodesic_angle(const Mat3& r1, const Mat3& r2);

/// Orthonormality and det = +1, both per-entry within tol.
bool is_proper_rotation(const Mat3& r, double tol = 1e-9);

Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad);

}  // namespace sulreg
