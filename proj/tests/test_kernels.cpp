#include <gtest/gtest.h>

#include <omp.h>

#include "sulreg/kernels.hpp"
#include "sulreg/synthetic.hpp"
#include "test_support.hpp"

using namespace sulreg;
using namespace sulreg::testing;

namespace {

class KernelsTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }
  int saved_ = 1;
};

SyntheticPair scene(std::size_t points, std::size_t corrs) {
  SyntheticSpec s;
  s.n_points = points;
  s.n_correspondences = corrs;
  s.outlier_rate = 0.5;
  s.noise_sigma = 0.002;
  s.seed = 11;
  return synthesize_pair(s);
}

bool same(const LineVector& a, const LineVector& b) {
  return a.i == b.i && a.j == b.j && a.v_source == b.v_source && a.v_target == b.v_target &&
         a.scale_ratio == b.scale_ratio;
}

}  // namespace

TEST_P(KernelsTest, ResidualsBitIdentical) {
  const auto p = scene(10000, 9000);  // above the parallel cutoff
  EXPECT_EQ(kernels::compute_residuals(p.gt, p.corrs),
            kernels::serial::compute_residuals(p.gt, p.corrs));
}

TEST_P(KernelsTest, NormalsBitIdentical) {
  const auto p = scene(3000, 100);
  const SpatialIndex idx(p.source);
  const auto a = kernels::estimate_normals(idx, p.source, 20);
  const auto b = kernels::serial::estimate_normals(idx, p.source, 20);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].has_value(), b[i].has_value());
    if (a[i]) ASSERT_EQ(*a[i], *b[i]);
  }
}

TEST_P(KernelsTest, PairVectorsBitIdentical) {
  auto p = scene(1000, 300);
  p.corrs[5].target = p.corrs[6].target;  // one zero-length target vector
  IndexSet members;
  for (Index i = 0; i < p.corrs.size(); i += 2) members.push_back(i);
  members.push_back(5);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  const auto a = kernels::build_pair_vectors(p.corrs, members);
  const auto b = kernels::serial::build_pair_vectors(p.corrs, members);
  ASSERT_EQ(a.vectors.size(), b.vectors.size());
  EXPECT_EQ(a.skipped, b.skipped);
  for (std::size_t i = 0; i < a.vectors.size(); ++i) ASSERT_TRUE(same(a.vectors[i], b.vectors[i]));
  for (std::size_t i = 1; i < a.vectors.size(); ++i) {
    ASSERT_TRUE(std::pair(a.vectors[i - 1].i, a.vectors[i - 1].j) <
                std::pair(a.vectors[i].i, a.vectors[i].j));
  }
}

TEST_P(KernelsTest, CountBelow) {
  Rng rng(3);
  std::vector<double> v(50000);
  for (auto& x : v) x = uniform01(rng);
  EXPECT_EQ(kernels::count_below(v, 0.3), kernels::serial::count_below(v, 0.3));
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelsTest, ::testing::Values(1, 2, 4));

TEST(MakeLineVector, OrdersAndRejectsZero) {
  CorrespondenceSet c{{Vec3(0, 0, 0), Vec3(0, 0, 0)},
                      {Vec3(1, 0, 0), Vec3(2, 0, 0)},
                      {Vec3(5, 5, 5), Vec3(0, 0, 0)}};
  const auto lv = kernels::make_line_vector(c, 1, 0);
  ASSERT_TRUE(lv);
  EXPECT_EQ(lv->i, 0u);
  EXPECT_EQ(lv->j, 1u);
  EXPECT_EQ(lv->v_source, Vec3(-1, 0, 0));
  EXPECT_EQ(lv->v_target, Vec3(-2, 0, 0));
  EXPECT_DOUBLE_EQ(lv->scale_ratio, 0.5);
  EXPECT_FALSE(kernels::make_line_vector(c, 0, 2));
}
