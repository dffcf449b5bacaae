#include "sulreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sulreg/geometry.hpp"

namespace sulreg {

double rotation_error(const Mat3& r_gt, const Mat3& r_est) {
  return rotation_geodesic_angle(r_gt, r_est) * 180.0 / std::numbers::pi;
}

double translation_error(const Vec3& t_gt, const Vec3& t_est) { return (t_gt - t_est).norm(); }

namespace {

std::vector<double> point_errors(std::span<const Vec3> source, const RigidTransform& gt,
                                 const RigidTransform& est) {
  if (source.empty()) throw Error(ErrorCode::EmptyCloud, "metrics need a non-empty source cloud");
  std::vector<double> out;
  out.reserve(source.size());
  for (const auto& p : source) out.push_back((gt(p) - est(p)).norm());
  return out;
}

}  // namespace

double rmse(std::span<const Vec3> source, const RigidTransform& gt, const RigidTransform& est) {
  const auto err = point_errors(source, gt, est);
  double sum = 0.0;
  for (double e : err) sum += e * e;
  return std::sqrt(sum / static_cast<double>(err.size()));
}

double mese(std::span<const Vec3> source, const RigidTransform& gt, const RigidTransform& est) {
  auto err = point_errors(source, gt, est);
  std::sort(err.begin(), err.end());
  const std::size_t n = err.size();
  return n % 2 == 1 ? err[n / 2] : 0.5 * (err[n / 2 - 1] + err[n / 2]);
}

PrecisionRecall precision_recall_f1(std::span<const Index> predicted, std::span<const Index> truth) {
  std::vector<Index> tp;
  std::set_intersection(predicted.begin(), predicted.end(), truth.begin(), truth.end(),
                        std::back_inserter(tp));
  const auto true_pos = static_cast<double>(tp.size());
  const auto false_pos = static_cast<double>(predicted.size()) - true_pos;
  const auto false_neg = static_cast<double>(truth.size()) - true_pos;

  PrecisionRecall out;
  out.precision = true_pos + false_pos > 0.0 ? true_pos / (true_pos + false_pos) : 0.0;
  out.recall = true_pos + false_neg > 0.0 ? true_pos / (true_pos + false_neg) : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

MetricsReport evaluate(std::span<const Vec3> source, const RigidTransform& gt,
                       const RigidTransform& est, std::span<const Index> predicted_inliers,
                       std::span<const Index> true_inliers, double runtime_seconds) {
  MetricsReport m;
  m.rotation_error_deg = rotation_error(gt.rotation, est.rotation);
  m.translation_error = translation_error(gt.translation, est.translation);
  m.rmse = rmse(source, gt, est);
  m.mese = mese(source, gt, est);
  const auto prf = precision_recall_f1(predicted_inliers, true_inliers);
  m.precision = prf.precision;
  m.recall = prf.recall;
  m.f1 = prf.f1;
  m.runtime_seconds = runtime_seconds;
  return m;
}

}  // namespace sulreg
