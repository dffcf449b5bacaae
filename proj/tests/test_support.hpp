#pragma once

#include <cmath>
#include <numbers>

#include "sulreg/geometry.hpp"
#include "sulreg/random.hpp"
#include "sulreg/types.hpp"

namespace sulreg::testing {

inline Vec3 random_vec(Rng& rng, double half = 1.0) {
  return Vec3((2 * uniform01(rng) - 1) * half, (2 * uniform01(rng) - 1) * half,
              (2 * uniform01(rng) - 1) * half);
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  return v.normalized();
}

inline Mat3 random_rotation(Rng& rng) {
  return axis_angle_rotation(random_unit(rng), std::numbers::pi * uniform01(rng));
}

inline RigidTransform random_transform(Rng& rng, double t_scale = 1.0) {
  return {random_rotation(rng), random_vec(rng, t_scale)};
}

inline PointCloud random_cloud(Rng& rng, std::size_t n, double half = 1.0) {
  PointCloud c(n);
  for (auto& p : c) p = random_vec(rng, half);
  return c;
}

inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace sulreg::testing
