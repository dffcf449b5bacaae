#pragma once

#include <span>

#include "sulreg/types.hpp"

namespace sulreg {

struct MetricsReport {
  double rotation_error_deg = 0.0;
  double translation_error = 0.0;
  double rmse = 0.0;
  double mese = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double runtime_seconds = 0.0;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double rotation_error(const Mat3& r_gt, const Mat3& r_est);  // degrees
double translation_error(const Vec3& t_gt, const Vec3& t_est);

/// Root mean square of |gt(x) - est(x)| over the source cloud. Throws EmptyCloud.
double rmse(std::span<const Vec3> source, const RigidTransform& gt, const RigidTransform& est);

/// Median of |gt(x) - est(x)|; mean of the middle pair for even counts.
double mese(std::span<const Vec3> source, const RigidTransform& gt, const RigidTransform& est);

/// Both index sets ascending. Zero denominators give zero.
PrecisionRecall precision_recall_f1(std::span<const Index> predicted, std::span<const Index> truth);

MetricsReport evaluate(std::span<const Vec3> source, const RigidTransform& gt,
                       const RigidTransform& est, std::span<const Index> predicted_inliers,
                       std::span<const Index> true_inliers, double runtime_seconds);

}  // namespace sulreg
