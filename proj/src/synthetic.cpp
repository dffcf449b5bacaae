#include "sulreg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "sulreg/geometry.hpp"
#include "sulreg/random.hpp"

namespace sulreg {

SurfaceModel parse_surface_model(std::string_view s) {
  if (s == "random-blobs") return SurfaceModel::RandomBlobs;
  if (s == "multi-plane") return SurfaceModel::MultiPlane;
  throw Error(ErrorCode::InvalidArgument, "unknown surface model: " + std::string(s));
}

const char* to_string(SurfaceModel m) {
  return m == SurfaceModel::RandomBlobs ? "random-blobs" : "multi-plane";
}

void SyntheticSpec::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (n_points == 0) bad("n_points must be positive");
  if (n_correspondences == 0 || n_correspondences > n_points) {
    bad("n_correspondences must lie in [1, n_points]");
  }
  if (!(outlier_rate >= 0.0 && outlier_rate < 1.0)) bad("outlier_rate must lie in [0, 1)");
  if (!(noise_sigma >= 0.0)) bad("noise_sigma must be non-negative");
  if (!(rotation_magnitude_deg >= 0.0 && rotation_magnitude_deg <= 180.0)) {
    bad("rotation magnitude must lie in [0, 180]");
  }
  if (!(translation_magnitude >= 0.0)) bad("translation magnitude must be non-negative");
  if (!(scene_extent > 0.0)) bad("scene extent must be positive");
  if (!(residual_threshold > 0.0)) bad("residual threshold must be positive");
}

namespace {

Vec3 random_unit(Rng& rng) {
  while (true) {
    Vec3 v(standard_normal(rng), standard_normal(rng), standard_normal(rng));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Vec3 uniform_in_cube(Rng& rng, double half) {
  return Vec3((2.0 * uniform01(rng) - 1.0) * half, (2.0 * uniform01(rng) - 1.0) * half,
              (2.0 * uniform01(rng) - 1.0) * half);
}

PointCloud sample_blobs(std::size_t n, double extent, Rng& rng) {
  constexpr int kBlobs = 6;
  std::vector<Vec3> centers;
  std::vector<double> radii;
  std::vector<double> area;
  double total = 0.0;
  for (int b = 0; b < kBlobs; ++b) {
    centers.push_back(uniform_in_cube(rng, 0.3 * extent));
    radii.push_back(extent * (0.08 + 0.12 * uniform01(rng)));
    area.push_back(radii.back() * radii.back());
    total += area.back();
  }
  PointCloud pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Area-proportional blob choice.
    double u = uniform01(rng) * total;
    int b = 0;
    while (b + 1 < kBlobs && u >= area[b]) u -= area[b++];
    pts.push_back(centers[b] + radii[b] * random_unit(rng));
  }
  return pts;
}

PointCloud sample_planes(std::size_t n, double extent, Rng& rng) {
  constexpr int kPlanes = 6;
  struct Patch {
    Vec3 center, u, v;
    double half_u, half_v;
  };
  std::vector<Patch> patches;
  double total = 0.0;
  std::vector<double> area;
  for (int p = 0; p < kPlanes; ++p) {
    const Vec3 normal = random_unit(rng);
    Vec3 u = normal.unitOrthogonal();
    Vec3 v = normal.cross(u);
    Patch patch{uniform_in_cube(rng, 0.25 * extent), u, v, extent * (0.15 + 0.15 * uniform01(rng)),
                extent * (0.15 + 0.15 * uniform01(rng))};
    area.push_back(patch.half_u * patch.half_v);
    total += area.back();
    patches.push_back(patch);
  }
  PointCloud pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = uniform01(rng) * total;
    int p = 0;
    while (p + 1 < kPlanes && a >= area[p]) a -= area[p++];
    const Patch& pa = patches[p];
    pts.push_back(pa.center + (2.0 * uniform01(rng) - 1.0) * pa.half_u * pa.u +
                  (2.0 * uniform01(rng) - 1.0) * pa.half_v * pa.v);
  }
  return pts;
}

}  // namespace

SyntheticPair synthesize_pair(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticPair out;

  out.source = spec.surface_model == SurfaceModel::RandomBlobs
                   ? sample_blobs(spec.n_points, spec.scene_extent, rng)
                   : sample_planes(spec.n_points, spec.scene_extent, rng);

  const double angle = spec.rotation_magnitude_deg * std::numbers::pi / 180.0;
  out.gt.rotation = axis_angle_rotation(random_unit(rng), angle);
  out.gt.translation = spec.translation_magnitude * random_unit(rng);

  out.target.reserve(out.source.size());
  for (const auto& p : out.source) {
    const Vec3 noise(standard_normal(rng), standard_normal(rng), standard_normal(rng));
    out.target.push_back(out.gt(p) + spec.noise_sigma * noise);
  }

  const double tr = spec.residual_threshold;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < out.source.size(); ++i) {
    if ((out.gt(out.source[i]) - out.target[i]).norm() < tr) eligible.push_back(i);
  }
  const auto n_outliers = static_cast<std::size_t>(
      std::llround(spec.outlier_rate * static_cast<double>(spec.n_correspondences)));
  const std::size_t n_inliers = spec.n_correspondences - n_outliers;
  if (n_inliers > eligible.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "noise too large: not enough points with residual below the threshold");
  }

  struct Labeled {
    std::size_t s, t;
    bool inlier;
  };
  std::vector<Labeled> pairs;
  pairs.reserve(spec.n_correspondences);
  for (std::size_t pos : sample_without_replacement(rng, eligible.size(), n_inliers)) {
    pairs.push_back({eligible[pos], eligible[pos], true});
  }
  const std::size_t n = out.source.size();
  for (std::size_t k = 0; k < n_outliers; ++k) {
    for (int attempt = 0;; ++attempt) {
      const auto s = static_cast<std::size_t>(uniform_index(rng, n));
      const auto t = static_cast<std::size_t>(uniform_index(rng, n));
      if ((out.gt(out.source[s]) - out.target[t]).norm() >= 3.0 * tr) {
        pairs.push_back({s, t, false});
        break;
      }
      if (attempt > 100000) {
        throw Error(ErrorCode::InvalidArgument, "scene too small to place outliers");
      }
    }
  }
  // Shuffle so labels carry no positional signal.
  for (std::size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[static_cast<std::size_t>(uniform_index(rng, i))]);
  }
  out.corrs.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.corrs.emplace_back(out.source[pairs[i].s], out.target[pairs[i].t]);
    if (pairs[i].inlier) out.true_inliers.push_back(i);
  }
  return out;
}

}  // namespace sulreg
