#include <gtest/gtest.h>

#include <algorithm>

#include "sulreg/robust_solver.hpp"
#include "test_support.hpp"

using namespace sulreg;
using namespace sulreg::testing;

namespace {

LineVector make_lv(const Vec3& vs, const Vec3& vt) {
  LineVector lv;
  lv.v_source = vs;
  lv.v_target = vt;
  lv.scale_ratio = vs.norm() / vt.norm();
  return lv;
}

LineVectorSet planted(Rng& rng, const Mat3& r, std::size_t n, double outlier_share, double noise = 0.0) {
  LineVectorSet out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 vs = random_vec(rng);
    const bool outlier = double(i) < outlier_share * double(n);
    const Vec3 vt = outlier ? random_vec(rng)
                            : Vec3(r * vs + noise * Vec3(standard_normal(rng), standard_normal(rng),
                                                         standard_normal(rng)));
    out.push_back(make_lv(vs, vt));
  }
  return out;
}

Vec3 median_oracle(std::vector<Vec3> d) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> v;
    for (const auto& x : d) v.push_back(x[a]);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out[a] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  return out;
}

}  // namespace

TEST(Gnc, NoiselessRecovery) {
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Mat3 g = random_rotation(rng);
    const auto res = estimate_rotation_gnc(planted(rng, g, 30, 0.0), GncConfig{});
    EXPECT_LT(rotation_geodesic_angle(res.rotation, g), 1e-6);
  }
}

TEST(Gnc, MinimalOrthogonalPair) {
  Rng rng(2);
  const Mat3 g = random_rotation(rng);
  LineVectorSet lvs{make_lv(Vec3::UnitX(), g * Vec3::UnitX()), make_lv(Vec3::UnitY(), g * Vec3::UnitY())};
  EXPECT_LT(rotation_geodesic_angle(estimate_rotation_gnc(lvs, GncConfig{}).rotation, g), 1e-6);
}

TEST(Gnc, SixtyPercentOutliers) {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Mat3 g = random_rotation(rng);
    const auto res = estimate_rotation_gnc(planted(rng, g, 100, 0.6, 0.005), GncConfig{});
    EXPECT_LT(deg(rotation_geodesic_angle(res.rotation, g)), 0.5) << "trial " << k;
  }
}

TEST(Gnc, InvariantsAlongTrajectory) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const Mat3 g = random_rotation(rng);
    const auto res = estimate_rotation_gnc(planted(rng, g, 80, 0.5, 0.01), GncConfig{});
    EXPECT_TRUE(is_proper_rotation(res.rotation));
    for (double m : res.min_weight_trace) EXPECT_GE(m, 0.0);
    for (double m : res.max_weight_trace) EXPECT_LE(m, 1.0);
    for (double w : res.weights) EXPECT_TRUE(w >= 0.0 && w <= 1.0);
    for (std::size_t i = 1; i < res.accepted_objective.size(); ++i) {
      EXPECT_LE(res.accepted_objective[i], res.accepted_objective[i - 1] + 1e-12);
    }
  }
}

TEST(Gnc, Equivariance) {
  Rng rng(5);
  const Mat3 g = random_rotation(rng);
  const Mat3 q = random_rotation(rng);
  const auto lvs = planted(rng, g, 40, 0.0);
  LineVectorSet rotated;
  for (const auto& lv : lvs) rotated.push_back(make_lv(lv.v_source, q * lv.v_target));
  const auto a = estimate_rotation_gnc(lvs, GncConfig{});
  const auto b = estimate_rotation_gnc(rotated, GncConfig{});
  EXPECT_LT((b.rotation - q * a.rotation).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Gnc, Degenerate) {
  LineVectorSet par{make_lv(Vec3(1, 0, 0), Vec3(0, 1, 0)), make_lv(Vec3(-2, 0, 0), Vec3(0, -2, 0))};
  try {
    estimate_rotation_gnc(par, GncConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateInput);
  }
  EXPECT_THROW(estimate_rotation_gnc(LineVectorSet{par[0]}, GncConfig{}), Error);
  GncConfig bad;
  bad.mu_update_factor = 1.0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Translation, Examples) {
  Rng rng(6);
  const auto g = random_transform(rng);
  CorrespondenceSet c;
  for (int i = 0; i < 15; ++i) {
    const Vec3 x = random_vec(rng);
    c.emplace_back(x, g(x));
  }
  EXPECT_LT((estimate_translation(c, g.rotation) - g.translation).norm(), 1e-12);

  CorrespondenceSet three{{Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3(9, 9, 9)}};
  EXPECT_EQ(estimate_translation(three, Mat3::Identity()), Vec3::Zero());
}

TEST(Translation, SeventyPercentInliers) {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_transform(rng);
    CorrespondenceSet c;
    for (int i = 0; i < 200; ++i) {
      const Vec3 x = random_vec(rng);
      const Vec3 noise(standard_normal(rng), standard_normal(rng), standard_normal(rng));
      c.emplace_back(x, i < 140 ? Vec3(g(x) + 0.005 * noise) : random_vec(rng, 3));
    }
    EXPECT_LT((estimate_translation(c, g.rotation) - g.translation).norm(), 0.01);
  }
}

TEST(Translation, MatchesSortOracle) {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const Mat3 r = random_rotation(rng);
    CorrespondenceSet c;
    std::vector<Vec3> d;
    const std::size_t n = 1 + uniform_index(rng, 40);
    for (std::size_t i = 0; i < n; ++i) {
      c.emplace_back(random_vec(rng), random_vec(rng));
      d.push_back(c.back().target - r * c.back().source);
    }
    EXPECT_EQ(estimate_translation(c, r), median_oracle(d));
  }
}

TEST(LocalTransform, InlierBasicSet) {
  Rng rng(9);
  const auto g = random_transform(rng);
  CorrespondenceSet c;
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = random_vec(rng);
    c.emplace_back(x, g(x));
  }
  LineVectorSet lvs;
  for (Index i = 0; i + 1 < 20; i += 2) {
    LineVector lv = make_lv(c[i].source - c[i + 1].source, c[i].target - c[i + 1].target);
    lv.i = i;
    lv.j = i + 1;
    lvs.push_back(lv);
  }
  const auto est = estimate_local_transform(lvs, c, GncConfig{});
  EXPECT_LT(rotation_geodesic_angle(est.transform.rotation, g.rotation), 1e-6);
  EXPECT_LT((est.transform.translation - g.translation).norm(), 1e-6);
}

TEST(LocalTransform, HalfOutliers) {
  Rng rng(10);
  for (int k = 0; k < 20; ++k) {
    const auto g = random_transform(rng, 0.5);
    CorrespondenceSet c;
    for (int i = 0; i < 60; ++i) {
      const Vec3 x = random_vec(rng);
      const Vec3 noise(standard_normal(rng), standard_normal(rng), standard_normal(rng));
      c.emplace_back(x, i < 30 ? Vec3(g(x) + 0.003 * noise) : random_vec(rng));
    }
    // Basic set: half the vectors join two inliers, half touch an outlier.
    LineVectorSet lvs;
    for (Index i = 0; i < 30; ++i) {
      const Index a = i, b = i < 15 ? (i + 1) % 30 : 30 + i;
      LineVector lv = make_lv(c[a].source - c[b].source, c[a].target - c[b].target);
      lv.i = std::min(a, b);
      lv.j = std::max(a, b);
      if (lv.i != a) {
        lv.v_source = -lv.v_source;
        lv.v_target = -lv.v_target;
      }
      lvs.push_back(lv);
    }
    const auto est = estimate_local_transform(lvs, c, GncConfig{});
    EXPECT_LT(deg(rotation_geodesic_angle(est.transform.rotation, g.rotation)), 1.0) << k;
    EXPECT_LT((est.transform.translation - g.translation).norm(), 0.02) << k;
  }
}

TEST(LocalTransform, Degenerate) {
  CorrespondenceSet c{{Vec3(0, 0, 0), Vec3(0, 0, 0)}, {Vec3(1, 0, 0), Vec3(1, 0, 0)}, {Vec3(2, 0, 0), Vec3(2, 0, 0)}};
  LineVectorSet lvs{make_lv(Vec3(-1, 0, 0), Vec3(-1, 0, 0)), make_lv(Vec3(-2, 0, 0), Vec3(-2, 0, 0))};
  lvs[0].i = 0, lvs[0].j = 1, lvs[1].i = 0, lvs[1].j = 2;
  EXPECT_THROW(estimate_local_transform(lvs, c, GncConfig{}), Error);
}
