#include "sulreg/robust_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "sulreg/geometry.hpp"

namespace sulreg {

void GncConfig::validate() const {
  if (!(noise_bound > 0.0) || !(mu_update_factor > 1.0) || max_iterations <= 0 ||
      !(convergence_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid GNC configuration");
  }
}

double tls_objective(const Mat3& r, std::span<const LineVector> lvs, double noise_bound) {
  const double c2 = noise_bound * noise_bound;
  double cost = 0.0;
  for (const auto& lv : lvs) cost += std::min((r * lv.v_source - lv.v_target).squaredNorm(), c2);
  return cost;
}

bool all_source_vectors_parallel(std::span<const LineVector> lvs) {
  // Rank of the scatter of unit directions.
  Mat3 s = Mat3::Zero();
  for (const auto& lv : lvs) {
    const Vec3 d = lv.v_source.normalized();
    s += d * d.transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(s);
  const Vec3& sv = svd.singularValues();
  return !(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0);
}

namespace {

// TLS weight under the GNC surrogate with parameter mu and bound c2.
double tls_weight(double r2, double mu, double c2) {
  const double lower = mu / (mu + 1.0) * c2;
  const double upper = (mu + 1.0) / mu * c2;
  if (r2 <= lower) return 1.0;
  if (r2 >= upper) return 0.0;
  const double w = std::sqrt(c2 / r2) * std::sqrt(mu * (mu + 1.0)) - mu;
  return std::clamp(w, 0.0, 1.0);
}

}  // namespace

GncResult estimate_rotation_gnc(std::span<const LineVector> lvs, const GncConfig& cfg,
                                const Mat3& initial) {
  cfg.validate();
  if (lvs.size() < 2) throw Error(ErrorCode::DegenerateInput, "need at least two line vectors");
  if (all_source_vectors_parallel(lvs)) throw Error(ErrorCode::DegenerateInput, "all source vectors are parallel");

  const std::size_t n = lvs.size();
  const double c2 = cfg.noise_bound * cfg.noise_bound;
  std::vector<Vec3> from(n);
  std::vector<Vec3> to(n);
  for (std::size_t i = 0; i < n; ++i) {
    from[i] = lvs[i].v_source;
    to[i] = lvs[i].v_target;
  }

  std::vector<double> r2(n);
  auto refresh_residuals = [&](const Mat3& r) {
    double max_r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = (r * from[i] - to[i]).squaredNorm();
      max_r2 = std::max(max_r2, r2[i]);
    }
    return max_r2;
  };

  GncResult out;
  Mat3 rotation = initial;
  const double max_r2 = refresh_residuals(rotation);

  out.rotation = rotation;
  out.objective = tls_objective(rotation, lvs, cfg.noise_bound);
  out.accepted_objective.push_back(out.objective);
  std::vector<double> weights(n, 1.0);
  std::vector<double> best_weights(n);
  for (std::size_t i = 0; i < n; ++i) best_weights[i] = r2[i] <= c2 ? 1.0 : 0.0;

  if (max_r2 <= c2) {
    // Every residual is inside the bound: TLS coincides with least squares.
    rotation = weighted_rotation_fit(from, to, weights);
    const double obj = tls_objective(rotation, lvs, cfg.noise_bound);
    if (obj <= out.objective) {
      out.rotation = rotation;
      out.objective = obj;
      out.accepted_objective.push_back(obj);
    }
    refresh_residuals(out.rotation);
    for (std::size_t i = 0; i < n; ++i) best_weights[i] = r2[i] <= c2 ? 1.0 : 0.0;
    out.weights = std::move(best_weights);
    out.converged = true;
    out.iterations = 1;
    return out;
  }

  double mu = c2 / std::max(2.0 * max_r2 - c2, 1e-300);
  for (std::size_t i = 0; i < n; ++i) weights[i] = tls_weight(r2[i], mu, c2);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    Mat3 next;
    try {
      next = weighted_rotation_fit(from, to, weights);
    } catch (const Error&) {
      break;  // weights collapsed onto parallel vectors; keep the best iterate
    }
    rotation = next;
    refresh_residuals(rotation);

    const double obj = tls_objective(rotation, lvs, cfg.noise_bound);
    if (obj < out.objective) {
      out.rotation = rotation;
      out.objective = obj;
      out.accepted_objective.push_back(obj);
      for (std::size_t i = 0; i < n; ++i) best_weights[i] = weights[i];
    }

    mu *= cfg.mu_update_factor;
    double change = 0.0;
    bool binary = true;
    double w_min = 1.0;
    double w_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = tls_weight(r2[i], mu, c2);
      change += std::abs(w - weights[i]);
      weights[i] = w;
      binary = binary && (w == 0.0 || w == 1.0);
      w_min = std::min(w_min, w);
      w_max = std::max(w_max, w);
    }
    out.min_weight_trace.push_back(w_min);
    out.max_weight_trace.push_back(w_max);
    if (change < cfg.convergence_tol || binary) {
      out.converged = true;
      break;
    }
  }

  // Report inlier weights of the returned rotation.
  refresh_residuals(out.rotation);
  for (std::size_t i = 0; i < n; ++i) best_weights[i] = r2[i] <= c2 ? 1.0 : 0.0;
  out.weights = std::move(best_weights);
  return out;
}

namespace {

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Vec3 median_offset(std::span<const Vec3> offsets) {
  if (offsets.empty()) throw Error(ErrorCode::InvalidArgument, "median of an empty set");
  Vec3 out;
  std::vector<double> axis(offsets.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < offsets.size(); ++i) axis[i] = offsets[i](a);
    out(a) = median_in_place(axis);
  }
  return out;
}

}  // namespace

Vec3 estimate_translation(std::span<const Correspondence> corrs, const Mat3& rotation) {
  std::vector<Vec3> offsets;
  offsets.reserve(corrs.size());
  for (const auto& c : corrs) offsets.push_back(c.target - rotation * c.source);
  return median_offset(offsets);
}

Vec3 estimate_translation(const CorrespondenceSet& corrs, std::span<const Index> members,
                          const Mat3& rotation) {
  std::vector<Vec3> offsets;
  offsets.reserve(members.size());
  for (Index m : members) offsets.push_back(corrs[m].target - rotation * corrs[m].source);
  return median_offset(offsets);
}

LocalEstimate estimate_local_transform(std::span<const LineVector> basic_lvs,
                                       const CorrespondenceSet& corrs, const GncConfig& cfg,
                                       const Mat3& initial_rotation) {
  const GncResult gnc = estimate_rotation_gnc(basic_lvs, cfg, initial_rotation);

  auto endpoints = [&](bool kept_only) {
    IndexSet ids;
    for (std::size_t k = 0; k < basic_lvs.size(); ++k) {
      if (kept_only && gnc.weights[k] < 0.5) continue;
      ids.push_back(basic_lvs[k].i);
      ids.push_back(basic_lvs[k].j);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  IndexSet support = endpoints(true);
  if (support.empty()) support = endpoints(false);

  LocalEstimate out;
  out.transform.rotation = gnc.rotation;
  out.transform.translation = estimate_translation(corrs, support, gnc.rotation);
  out.converged = gnc.converged;
  out.translation_support = support.size();
  return out;
}

}  // namespace sulreg
