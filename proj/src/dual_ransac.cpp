#include "sulreg/dual_ransac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sulreg/geometry.hpp"
#include "sulreg/kernels.hpp"
#include "sulreg/normals.hpp"
#include "sulreg/random.hpp"

namespace sulreg {

void RansacConfig::validate() const {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(residual_threshold > 0.0)) bad("residual threshold must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) bad("confidence must lie in (0, 1)");
  if (r_max < 0) bad("r_max must be non-negative");
  if (!(alpha_pct > 0.0 && alpha_pct <= 100.0)) bad("alpha must lie in (0, 100]");
  if (!(beta_pct > 0.0 && beta_pct <= 100.0)) bad("beta must lie in (0, 100]");
  if (!(rotation_term_tol > 0.0)) bad("rotation termination tolerance must be positive");
  if (!(noise_bound > 0.0)) bad("noise bound must be positive");
  if (max_local_iterations <= 0) bad("max_local_iterations must be positive");
  if (k_normals < 3) bad("k_normals must be at least 3");
  gnc_config().validate();
}

double confidence_level(double inlier_rate, std::uint64_t iterations) {
  if (iterations == 0) return 0.0;
  const double miss = 1.0 - std::clamp(inlier_rate, 0.0, 1.0);
  return 1.0 - std::pow(miss, static_cast<double>(iterations));
}

IndexSet compute_inliers(const RigidTransform& t, const CorrespondenceSet& corrs, double threshold) {
  const auto res = kernels::compute_residuals(t, corrs);
  IndexSet out;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i] < threshold) out.push_back(i);
  }
  return out;
}

bool local_early_termination(const RigidTransform& global, const RigidTransform& local,
                             const RansacConfig& cfg) {
  return rotation_geodesic_angle(global.rotation, local.rotation) <= cfg.rotation_term_tol &&
         (global.translation - local.translation).norm() <= cfg.noise_bound;
}

const char* to_string(LocalExit e) {
  switch (e) {
    case LocalExit::EarlyTermination: return "early-termination";
    case LocalExit::Confidence: return "confidence";
    case LocalExit::SafetyCap: return "safety-cap";
  }
  return "?";
}

HistogramDump dump_histogram(const Histogram& h) {
  HistogramDump d;
  for (std::size_t b = 0; b < h.bin_count(); ++b) {
    d.low.push_back(h.bin_low(b));
    d.high.push_back(h.bin_high(b));
    d.count.push_back(h.counts[b]);
  }
  return d;
}

namespace {

std::size_t share_of(std::size_t n, double pct) {
  const auto k = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(n)));
  return std::min(n, std::max<std::size_t>(2, k));
}

LineVectorSet sample_vectors(std::span<const LineVector> from, std::size_t k, Rng& rng) {
  LineVectorSet out;
  out.reserve(k);
  for (std::size_t pos : sample_without_replacement(rng, from.size(), k)) out.push_back(from[pos]);
  return out;
}

std::size_t count_local_inliers(const RigidTransform& t, const CorrespondenceSet& corrs,
                                const IndexSet& members, double threshold) {
  std::size_t n = 0;
  for (Index m : members) n += residual(t, corrs[m]) < threshold ? 1 : 0;
  return n;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  return a > max - b ? max : a + b;
}

}  // namespace

LocalOutcome run_lcl_ransac(std::span<const LineVector> l_sul, const CorrespondenceSet& corrs,
                            const IndexSet& c_sul, const RigidTransform& received_global,
                            std::uint64_t t_glo, const RansacConfig& cfg, Rng& rng) {
  if (l_sul.size() < 2) throw Error(ErrorCode::DegenerateInput, "local run needs two line vectors");
  if (c_sul.empty()) throw Error(ErrorCode::DegenerateInput, "local run needs a local set");

  const LineVectorSet subset = sample_vectors(l_sul, share_of(l_sul.size(), cfg.alpha_pct), rng);
  if (all_source_vectors_parallel(subset)) {
    throw Error(ErrorCode::DegenerateInput, "sampled line vectors are all parallel");
  }
  const std::size_t basic_size = share_of(subset.size(), cfg.beta_pct);
  const GncConfig gnc = cfg.gnc_config();
  const auto local_size = static_cast<double>(c_sul.size());

  LocalOutcome out;
  out.transform = received_global;
  bool have_best = false;
  for (int attempt = 0; attempt < cfg.max_local_iterations; ++attempt) {
    const LineVectorSet basic = sample_vectors(subset, basic_size, rng);
    LocalEstimate est;
    try {
      est = estimate_local_transform(basic, corrs, gnc, received_global.rotation);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      ++out.degenerate_draws;
      continue;
    }
    ++out.local_iterations;

    const std::size_t count =
        count_local_inliers(est.transform, corrs, c_sul, cfg.residual_threshold);
    if (!have_best || count > out.local_inliers) {
      out.transform = est.transform;
      out.local_inliers = count;
      have_best = true;
    }
    if (local_early_termination(received_global, out.transform, cfg)) {
      out.exit = LocalExit::EarlyTermination;
      out.iterations = saturating_add(t_glo, out.local_iterations);
      return out;
    }
    const double cl = confidence_level(static_cast<double>(out.local_inliers) / local_size,
                                       out.local_iterations);
    if (cl >= cfg.confidence) {
      out.exit = LocalExit::Confidence;
      out.iterations = out.local_iterations;
      return out;
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::DegenerateInput, "no well-posed basic sample within the safety cap");
  }
  out.exit = LocalExit::SafetyCap;
  out.iterations = out.local_iterations;
  return out;
}

namespace {

IndexSet all_indices(std::size_t n) {
  IndexSet out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

struct LocalSets {
  IndexSet c_sul;
  LineVectorSet l_sul;
  RatioRange range = RatioRange::unbounded();
};

LocalSets construct_local_sets(CorrespondenceSet& corrs, std::span<const Vec3> source_cloud,
                               std::span<const Vec3> target_cloud, const RansacConfig& cfg,
                               RegistrationResult& result) {
  LocalSets sets;
  if (!cfg.use_ahs_lvlp) {
    sets.c_sul = all_indices(corrs.size());
    sets.l_sul = build_line_vectors(corrs, sets.c_sul).vectors;
    return sets;
  }

  annotate_normals(corrs, source_cloud, target_cloud, cfg.k_normals);
  try {
    const Histogram hist = build_angle_histogram(corrs);
    result.angle_histogram = dump_histogram(hist);
    sets.c_sul = ahs_filter(hist);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDistribution && e.code() != ErrorCode::EmptyResult) throw;
    result.notes.push_back(std::string("angle filter skipped: ") + e.what());
    sets.c_sul = all_indices(corrs.size());
  }
  if (sets.c_sul.size() < 2) {
    result.notes.push_back("angle filter kept fewer than two correspondences; using all");
    sets.c_sul = all_indices(corrs.size());
  }

  LineVectorSet tentative = build_line_vectors(corrs, sets.c_sul).vectors;
  if (tentative.empty()) return sets;
  LvlpResult lvlp = lvlp_filter(tentative);
  if (lvlp.histogram.bin_count() > 0) result.scale_ratio_histogram = dump_histogram(lvlp.histogram);
  sets.l_sul = std::move(lvlp.vectors);
  sets.range = lvlp.range;
  return sets;
}

// Line vectors the local run can work with this round: L^sul itself, or
// progressively unfiltered sets when it has fewer than two vectors.
LineVectorSet fallback_vectors(const CorrespondenceSet& corrs, const IndexSet& c_sul,
                               RegistrationResult& result) {
  if (c_sul.size() >= 2) {
    auto lvs = build_line_vectors(corrs, c_sul).vectors;
    if (lvs.size() >= 2) {
      result.notes.push_back("local line-vector set too small; using unfiltered local pairs");
      return lvs;
    }
  }
  auto lvs = build_line_vectors(corrs, all_indices(corrs.size())).vectors;
  result.notes.push_back("local line-vector set too small; using all pairs");
  return lvs;
}

}  // namespace

RegistrationResult run_registration(const CorrespondenceSet& input,
                                    std::span<const Vec3> source_cloud,
                                    std::span<const Vec3> target_cloud, const RansacConfig& cfg) {
  cfg.validate();
  if (input.size() < 3) {
    throw Error(ErrorCode::TooFewCorrespondences, "registration needs at least 3 correspondences");
  }
  RegistrationResult result;
  CorrespondenceSet corrs = input;
  for (auto& c : corrs) {
    if (!c.source.allFinite() || !c.target.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite correspondence coordinate");
    }
    c.weight = 0;
    c.prev_residual.reset();
    c.curr_residual.reset();
  }

  Rng rng(cfg.seed);
  SigmaSource sigma(cfg.sigma_mode, cfg.residual_threshold);
  LocalSets sets = construct_local_sets(corrs, source_cloud, target_cloud, cfg, result);

  RigidTransform global = RigidTransform::identity();
  IndexSet ir_glo = compute_inliers(global, corrs, cfg.residual_threshold);
  std::uint64_t t_glo = 0;
  double cl_glo = 0.0;
  int round = 0;
  const auto total = static_cast<double>(corrs.size());

  while (true) {
    RoundTrace tr;
    tr.round = round;

    const LineVectorSet* l_used = &sets.l_sul;
    LineVectorSet substitute;
    if (sets.l_sul.size() < 2) {
      substitute = fallback_vectors(corrs, sets.c_sul, result);
      l_used = &substitute;
    }
    if (sets.c_sul.empty()) {
      result.notes.push_back("local set emptied by self-update; reset to all correspondences");
      sets.c_sul = all_indices(corrs.size());
    }
    const IndexSet& c_used = sets.c_sul;
    tr.c_sul_size = c_used.size();
    tr.l_sul_size = l_used->size();

    LocalOutcome local;
    try {
      local = run_lcl_ransac(*l_used, corrs, c_used, global, t_glo, cfg, rng);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail() + " (round " + std::to_string(round) +
                                ", |C^sul|=" + std::to_string(c_used.size()) +
                                ", |L^sul|=" + std::to_string(l_used->size()) + ")");
    }
    tr.t_lcl = local.iterations;
    tr.local_iterations = local.local_iterations;
    tr.branch = local.exit;

    IndexSet candidate = compute_inliers(local.transform, corrs, cfg.residual_threshold);
    if (candidate.size() > ir_glo.size()) {
      global = local.transform;
      ir_glo = std::move(candidate);
      tr.adopted = true;
    }
    t_glo = saturating_add(t_glo, local.iterations);
    cl_glo = confidence_level(static_cast<double>(ir_glo.size()) / total, t_glo);

    const auto residuals = kernels::compute_residuals(global, corrs);
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      corrs[i].prev_residual = corrs[i].curr_residual;
      corrs[i].curr_residual = residuals[i];
    }

    tr.t_glo = t_glo;
    tr.ir_glo_size = ir_glo.size();
    tr.cl_glo = cl_glo;

    if (cl_glo >= cfg.confidence || round >= cfg.r_max) {
      result.trace.push_back(tr);
      break;
    }

    tr.continued = true;
    for (Index i : ir_glo) ++corrs[i].weight;
    if (cfg.use_sus) {
      sigma.begin_round(rng);
      SusOutcome sus = apply_sus(corrs, sets.c_sul, sets.l_sul, ir_glo, cfg.residual_threshold,
                                 sets.range, sigma, rng);
      sets.c_sul = std::move(sus.c_sul);
      sets.l_sul = std::move(sus.l_sul);
      tr.sus_included = sus.included;
      tr.sus_removed = sus.removed;
      result.sus_log.push_back(std::move(sus.decisions));
    }
    result.trace.push_back(tr);
    ++round;
  }

  result.rounds = round;
  result.total_iterations = t_glo;
  result.final_confidence = cl_glo;
  result.weights.reserve(corrs.size());
  for (const auto& c : corrs) result.weights.push_back(c.weight);

  std::vector<double> w(corrs.size(), 0.0);
  std::size_t positive = 0;
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    w[i] = static_cast<double>(corrs[i].weight);
    positive += corrs[i].weight > 0 ? 1 : 0;
  }
  auto uniform_over_inliers = [&] {
    result.uniform_weight_fallback = true;
    std::fill(w.begin(), w.end(), 0.0);
    for (Index i : ir_glo) w[i] = 1.0;
  };
  if (positive < 3) uniform_over_inliers();
  try {
    try {
      result.transform = weighted_kabsch(corrs, w);
    } catch (const Error& e) {
      // Accumulated weights can be degenerate (collinear) while the final
      // inlier set is not.
      if (e.code() != ErrorCode::DegenerateInput || result.uniform_weight_fallback) throw;
      uniform_over_inliers();
      result.notes.push_back("accumulated weights degenerate; using final inliers");
      result.transform = weighted_kabsch(corrs, w);
    }
  } catch (const Error& e) {
    throw Error(e.code(), "final weighted SVD: " + e.detail() +
                              " (|Ir_glo|=" + std::to_string(ir_glo.size()) +
                              ", rounds=" + std::to_string(round) + ")");
  }
  result.inlier_indices = compute_inliers(result.transform, corrs, cfg.residual_threshold);
  return result;
}

}  // namespace sulreg
