#include <gtest/gtest.h>

#include "sulreg/synthetic.hpp"
#include "test_support.hpp"

using namespace sulreg;
using namespace sulreg::testing;

TEST(Synthetic, InlierCountFromRate) {
  SyntheticSpec s;
  s.n_points = 2000;
  s.n_correspondences = 1000;
  s.outlier_rate = 0.7;
  s.noise_sigma = 0.003;
  s.seed = 3;
  const auto p = synthesize_pair(s);
  EXPECT_EQ(p.corrs.size(), 1000u);
  EXPECT_EQ(p.true_inliers.size(), 300u);
  EXPECT_TRUE(std::is_sorted(p.true_inliers.begin(), p.true_inliers.end()));
}

TEST(Synthetic, LabelsMatchResiduals) {
  for (auto model : {SurfaceModel::MultiPlane, SurfaceModel::RandomBlobs}) {
    for (double rate : {0.0, 0.5, 0.9}) {
      for (double sigma : {0.0, 0.003}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
          SyntheticSpec s;
          s.surface_model = model;
          s.outlier_rate = rate;
          s.noise_sigma = sigma;
          s.seed = seed;
          const auto p = synthesize_pair(s);
          std::size_t k = 0;
          for (std::size_t i = 0; i < p.corrs.size(); ++i) {
            const double r = residual(p.gt, p.corrs[i]);
            const bool labelled = k < p.true_inliers.size() && p.true_inliers[k] == i;
            if (labelled) {
              EXPECT_LT(r, s.residual_threshold);
              ++k;
            } else {
              EXPECT_GE(r, 3 * s.residual_threshold);
            }
          }
          EXPECT_EQ(k, p.true_inliers.size());
          EXPECT_NEAR(rotation_geodesic_angle(p.gt.rotation, Mat3::Identity()), s.rotation_magnitude_deg * std::numbers::pi / 180, 1e-12);
          EXPECT_NEAR(p.gt.translation.norm(), s.translation_magnitude, 1e-12);
        }
      }
    }
  }
}

TEST(Synthetic, Deterministic) {
  SyntheticSpec s;
  s.outlier_rate = 0.8;
  s.noise_sigma = 0.002;
  s.seed = 11;
  const auto a = synthesize_pair(s), b = synthesize_pair(s);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.target, b.target);
  EXPECT_EQ(a.true_inliers, b.true_inliers);
  ASSERT_EQ(a.corrs.size(), b.corrs.size());
  for (std::size_t i = 0; i < a.corrs.size(); ++i) EXPECT_EQ(a.corrs[i].target, b.corrs[i].target);
  s.seed = 12;
  EXPECT_NE(synthesize_pair(s).source, a.source);
}

TEST(Synthetic, NoiseTail) {
  SyntheticSpec s;
  s.noise_sigma = 0.002;
  s.residual_threshold = 1.0;
  s.seed = 5;
  const auto p = synthesize_pair(s);
  EXPECT_EQ(p.true_inliers.size(), p.corrs.size());
  // Residual of an inlier is the norm of a 3D Gaussian; 6 sigma per axis
  // bounds the norm at sqrt(3) * 6 sigma with overwhelming probability.
  for (const auto& c : p.corrs) EXPECT_LT(residual(p.gt, c), std::sqrt(3.0) * 6 * s.noise_sigma);
  double ss = 0;
  for (std::size_t i = 0; i < p.source.size(); ++i) ss += (p.gt(p.source[i]) - p.target[i]).squaredNorm();
  EXPECT_NEAR(std::sqrt(ss / (3.0 * p.source.size())), s.noise_sigma, 0.15 * s.noise_sigma);
}

TEST(Synthetic, Validation) {
  SyntheticSpec s;
  s.outlier_rate = 1.0;
  EXPECT_THROW(synthesize_pair(s), Error);
  s = SyntheticSpec{};
  s.n_correspondences = 5000;
  EXPECT_THROW(synthesize_pair(s), Error);
  EXPECT_EQ(parse_surface_model("random-blobs"), SurfaceModel::RandomBlobs);
  EXPECT_THROW(parse_surface_model("cube"), Error);
}

TEST(Synthetic, GaussianTailBound) {
  SyntheticSpec s;
  s.n_points = 10000;
  s.n_correspondences = 10000;
  s.noise_sigma = 0.002;
  s.residual_threshold = 1.0;
  s.seed = 6;
  const auto p = synthesize_pair(s);
  const double bound = 4 * s.noise_sigma * std::sqrt(3.0);
  std::size_t within = 0;
  for (const auto& c : p.corrs) within += residual(p.gt, c) <= bound;
  EXPECT_GE(double(within) / p.corrs.size(), 0.999);
}
