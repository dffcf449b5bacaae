#include "sulreg/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>

namespace sulreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::MissingNormals: return "MissingNormals";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::TooFewCorrespondences: return "TooFewCorrespondences";
    case ErrorCode::MissingResidual: return "MissingResidual";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

double residual(const RigidTransform& t, const Correspondence& c) {
  return (t(c.source) - c.target).norm();
}

namespace {

// Relative singular-value floor below which the cross-covariance is
// treated as rank deficient.
constexpr double kRankTolerance = 1e-12;

Mat3 rotation_from_covariance(const Mat3& h) {
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= kRankTolerance * s(0)) {
    throw Error(ErrorCode::DegenerateInput, "cross-covariance has rank < 2");
  }
  Mat3 v = svd.matrixV();
  const Mat3& u = svd.matrixU();
  if ((v * u.transpose()).determinant() < 0.0) v.col(2) *= -1.0;
  Mat3 r = v * u.transpose();
  // Re-orthonormalize so accumulated round-off never leaks into callers.
  Eigen::JacobiSVD<Mat3> clean(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return clean.matrixU() * clean.matrixV().transpose();
}

}  // namespace

RigidTransform weighted_kabsch(std::span<const Vec3> source, std::span<const Vec3> target,
                               std::span<const double> weights) {
  if (source.size() != target.size() || source.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "weighted_kabsch: size mismatch");
  }
  std::size_t positive = 0;
  double total = 0.0;
  Vec3 src_mean = Vec3::Zero();
  Vec3 tgt_mean = Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double w = weights[i];
    if (w < 0.0 || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidArgument, "weighted_kabsch: negative or non-finite weight");
    }
    if (w == 0.0) continue;
    ++positive;
    total += w;
    src_mean += w * source[i];
    tgt_mean += w * target[i];
  }
  if (positive < 3) {
    throw Error(ErrorCode::DegenerateInput,
                "weighted_kabsch: fewer than 3 positively weighted correspondences");
  }
  src_mean /= total;
  tgt_mean /= total;

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (weights[i] == 0.0) continue;
    h += (weights[i] / total) * (source[i] - src_mean) * (target[i] - tgt_mean).transpose();
  }
  RigidTransform out;
  out.rotation = rotation_from_covariance(h);
  out.translation = tgt_mean - out.rotation * src_mean;
  return out;
}

RigidTransform weighted_kabsch(const CorrespondenceSet& corrs, std::span<const double> weights) {
  std::vector<Vec3> src;
  std::vector<Vec3> tgt;
  src.reserve(corrs.size());
  tgt.reserve(corrs.size());
  for (const auto& c : corrs) {
    src.push_back(c.source);
    tgt.push_back(c.target);
  }
  return weighted_kabsch(src, tgt, weights);
}

Mat3 weighted_rotation_fit(std::span<const Vec3> from, std::span<const Vec3> to,
                           std::span<const double> weights) {
  if (from.size() != to.size() || from.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "weighted_rotation_fit: size mismatch");
  }
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (weights[i] > 0.0) h += weights[i] * from[i] * to[i].transpose();
  }
  return rotation_from_covariance(h);
}

double rotation_geodesic_angle(const Mat3& r1, const Mat3& r2) {
  const double c = ((r1 * r2.transpose()).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool is_proper_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if (((gram - Mat3::Identity()).cwiseAbs().maxCoeff()) > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
}

}  // namespace sulreg
