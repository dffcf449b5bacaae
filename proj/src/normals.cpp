#include "sulreg/normals.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sulreg/kernels.hpp"

namespace sulreg {

Vec3 canonicalize_sign(const Vec3& n) {
  int largest = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(n(a)) > std::abs(n(largest))) largest = a;
  }
  return n(largest) < 0.0 ? Vec3(-n) : n;
}

Vec3 normal_from_neighborhood(std::span<const Vec3> neighborhood) {
  if (neighborhood.empty()) {
    throw Error(ErrorCode::DegenerateNeighborhood, "empty neighborhood");
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& p : neighborhood) mean += p;
  mean /= static_cast<double>(neighborhood.size());

  Mat3 cov = Mat3::Zero();
  for (const auto& p : neighborhood) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(neighborhood.size());

  // Rank 0 up to round-off of the mean.
  const double floor = 1e-24 * (1.0 + mean.squaredNorm());
  if (cov.trace() <= floor) {
    throw Error(ErrorCode::DegenerateNeighborhood, "all neighbors coincide");
  }

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  return canonicalize_sign(eig.eigenvectors().col(0).normalized());
}

Vec3 estimate_normal(const SpatialIndex& index, const Vec3& point, std::size_t k) {
  const auto ids = index.knn(point, k);
  std::vector<Vec3> nbh;
  nbh.reserve(ids.size());
  for (Index id : ids) nbh.push_back(index.points()[id]);
  return normal_from_neighborhood(nbh);
}

void annotate_normals(CorrespondenceSet& corrs, std::span<const Vec3> source_cloud,
                      std::span<const Vec3> target_cloud, std::size_t k) {
  if (corrs.empty()) return;
  const SpatialIndex src_index(source_cloud);
  const SpatialIndex tgt_index(target_cloud);

  std::vector<Vec3> src_pts;
  std::vector<Vec3> tgt_pts;
  src_pts.reserve(corrs.size());
  tgt_pts.reserve(corrs.size());
  for (const auto& c : corrs) {
    src_pts.push_back(c.source);
    tgt_pts.push_back(c.target);
  }
  const auto src_normals = kernels::estimate_normals(src_index, src_pts, k);
  const auto tgt_normals = kernels::estimate_normals(tgt_index, tgt_pts, k);

  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (!src_normals[i] || !tgt_normals[i]) {
      throw Error(ErrorCode::DegenerateNeighborhood,
                  "degenerate neighborhood at correspondence " + std::to_string(i) +
                      (src_normals[i] ? " (target side)" : " (source side)"));
    }
  }
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    corrs[i].source_normal = *src_normals[i];
    corrs[i].target_normal = *tgt_normals[i];
  }
}

}  // namespace sulreg
