#pragma once

#include <span>

#include "sulreg/local_sets.hpp"
#include "sulreg/robust_solver.hpp"
#include "sulreg/self_update.hpp"
#include "sulreg/types.hpp"

namespace sulreg {

struct RansacConfig {
  double residual_threshold = 0.01;  // T_r
  double confidence = 0.995;
  int r_max = 5;
  double alpha_pct = 10.0;           // share of L^sul drawn once per local run
  double beta_pct = 30.0;            // share of that subset drawn per local hypothesis
  double rotation_term_tol = 0.01;   // radians, local early termination
  double noise_bound = 0.05;         // tau
  std::uint64_t seed = 0;
  int max_local_iterations = 10000;  // safety cap on local draws per round
  std::size_t k_normals = 20;
  bool use_ahs_lvlp = true;
  bool use_sus = true;
  SigmaMode sigma_mode = SigmaMode::PerEvaluation;
  GncConfig gnc;                     // noise_bound is overridden by `noise_bound`

  GncConfig gnc_config() const {
    GncConfig g = gnc;
    g.noise_bound = noise_bound;
    return g;
  }
  void validate() const;
};

/// 1 - (1 - inlier_rate)^iterations; zero iterations give zero.
double confidence_level(double inlier_rate, std::uint64_t iterations);

/// Indices whose residual under t is strictly below threshold.
IndexSet compute_inliers(const RigidTransform& t, const CorrespondenceSet& corrs, double threshold);

/// Both the rotation gap (geodesic) and the translation gap are within the
/// configured tolerances.
bool local_early_termination(const RigidTransform& global, const RigidTransform& local,
                             const RansacConfig& cfg);

enum class LocalExit { EarlyTermination, Confidence, SafetyCap };
const char* to_string(LocalExit e);

struct LocalOutcome {
  RigidTransform transform;
  std::uint64_t iterations = 0;        // reported count: t_glo + t_lcl on early termination
  std::uint64_t local_iterations = 0;  // hypotheses actually estimated
  std::uint64_t degenerate_draws = 0;
  std::size_t local_inliers = 0;       // best count on the local set
  LocalExit exit = LocalExit::Confidence;
};

/// Local RANSAC over the line-vector set. Hypotheses are scored by their
/// inlier count on `c_sul`; `received_global` seeds every rotation solve and
/// is the reference for early termination. Throws DegenerateInput when no
/// well-posed hypothesis could be drawn within the safety cap.
LocalOutcome run_lcl_ransac(std::span<const LineVector> l_sul, const CorrespondenceSet& corrs,
                            const IndexSet& c_sul, const RigidTransform& received_global,
                            std::uint64_t t_glo, const RansacConfig& cfg, Rng& rng);

struct RoundTrace {
  int round = 0;
  std::uint64_t t_glo = 0;             // after this round's update
  std::uint64_t t_lcl = 0;             // as reported by the local run
  std::uint64_t local_iterations = 0;
  std::size_t ir_glo_size = 0;
  double cl_glo = 0.0;
  std::size_t c_sul_size = 0;          // sizes the local run worked on
  std::size_t l_sul_size = 0;
  LocalExit branch = LocalExit::Confidence;
  bool adopted = false;                // local hypothesis replaced the global best
  bool continued = false;              // weights incremented and self-update ran
  std::size_t sus_included = 0;
  std::size_t sus_removed = 0;
};

struct HistogramDump {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<std::size_t> count;
};

HistogramDump dump_histogram(const Histogram& h);

struct RegistrationResult {
  RigidTransform transform;
  int rounds = 0;                       // completed self-update rounds (final R)
  std::uint64_t total_iterations = 0;   // final t_glo
  double final_confidence = 0.0;
  IndexSet inlier_indices;              // residual < T_r under `transform`
  std::vector<RoundTrace> trace;
  std::vector<std::uint32_t> weights;   // accumulated W
  bool uniform_weight_fallback = false;

  // Diagnostics.
  std::optional<HistogramDump> angle_histogram;
  std::optional<HistogramDump> scale_ratio_histogram;
  std::vector<std::vector<SusDecision>> sus_log;  // one entry per continued round
  std::vector<std::string> notes;                 // fallbacks taken
};

/// Full registration: local set construction, the global/local RANSAC
/// interaction with self-updates between rounds, and the final weighted
/// SVD. Deterministic for a fixed cfg.seed.
RegistrationResult run_registration(const CorrespondenceSet& corrs,
                                    std::span<const Vec3> source_cloud,
                                    std::span<const Vec3> target_cloud, const RansacConfig& cfg);

}  // namespace sulreg
