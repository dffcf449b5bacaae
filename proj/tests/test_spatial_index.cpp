#include <gtest/gtest.h>

#include <algorithm>

#include "sulreg/spatial_index.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace sulreg;
using namespace sulreg::testing;

TEST(SpatialIndex, SinglePoint) {
  const PointCloud one{Vec3(1, 2, 3)};
  const auto idx = build_index(one);
  EXPECT_EQ(knn(idx, Vec3(9, 9, 9), 5), std::vector<Index>{0});
}

TEST(SpatialIndex, CubeCorners) {
  PointCloud cube;
  for (int i = 0; i < 8; ++i) cube.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const auto res = knn(build_index(cube), Vec3(0.5, 0.5, 0.5), 8);
  // Equidistant: ties resolve by index.
  EXPECT_EQ(res, (std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(SpatialIndex, Collinear) {
  const PointCloud line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  EXPECT_EQ(knn(build_index(line), Vec3::Zero(), 2), (std::vector<Index>{0, 1}));
}

TEST(SpatialIndex, ExistingPoint) {
  Rng rng(1);
  const auto cloud = random_cloud(rng, 300);
  const auto idx = build_index(cloud);
  for (Index i = 0; i < cloud.size(); i += 17) EXPECT_EQ(knn(idx, cloud[i], 1).front(), i);
}

TEST(SpatialIndex, MatchesBruteForce) {
  Rng rng(2);
  for (int config = 0; config < 100; ++config) {
    const std::size_t n = 1 + uniform_index(rng, 1000);
    auto cloud = random_cloud(rng, n);
    if (config % 10 == 0) {
      // Duplicates and grid-aligned coordinates stress tie handling.
      for (auto& p : cloud) p = (p * 4).array().round() / 4;
    }
    const auto idx = build_index(cloud);
    for (int q = 0; q < 5; ++q) {
      const Vec3 query = random_vec(rng, 1.2);
      const std::size_t k = 1 + uniform_index(rng, 30);
      ASSERT_EQ(knn(idx, query, k), oracle::brute_knn(cloud, query, k)) << "config " << config;
    }
  }
}

TEST(SpatialIndex, Errors) {
  EXPECT_THROW(build_index(PointCloud{}), Error);
  const PointCloud bad{Vec3(0, 0, 0), Vec3(std::nan(""), 0, 0)};
  EXPECT_THROW(build_index(bad), Error);
}
