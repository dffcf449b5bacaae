#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sulreg/dual_ransac.hpp"
#include "sulreg/metrics.hpp"
#include "sulreg/synthetic.hpp"

namespace sulreg {

struct AblationCell {
  bool ahs_lvlp = true;
  bool sus = true;
};

/// {off,off}, {off,on}, {on,off}, {on,on} when ablating, else only {on,on}.
std::vector<AblationCell> ablation_cells(bool ablate);

struct SuiteConfig {
  std::vector<double> outlier_rates{0.5, 0.7, 0.8, 0.9};
  int trials = 50;
  std::uint64_t seed = 0;
  bool ablate = false;
  int workers = 1;
  SyntheticSpec scene;  // outlier_rate and seed are set per trial
  RansacConfig ransac;  // seed and the two toggles are set per trial
  double success_rotation_deg = 2.0;
  double success_translation = 0.03;

  void validate() const;
};

struct TrialRow {
  std::uint64_t scene_seed = 0;
  std::uint64_t run_seed = 0;
  double outlier_rate = 0.0;
  int trial = 0;
  AblationCell cell;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  int rounds = 0;
  std::uint64_t iterations = 0;

  bool success(double max_rot_deg, double max_trans) const {
    return ok && metrics.rotation_error_deg < max_rot_deg && metrics.translation_error < max_trans;
  }
};

std::uint64_t scene_seed(std::uint64_t suite_seed, std::size_t rate_index, int trial);
std::uint64_t run_seed(std::uint64_t suite_seed, std::size_t rate_index, int trial,
                       std::size_t cell_index);

/// Synthesizes the scene, runs registration and scores it. Registration
/// errors become a row with ok = false. Timing covers normal estimation
/// through the final weighted SVD.
TrialRow run_trial(const SyntheticSpec& scene, const RansacConfig& ransac);

/// Rows ordered by (rate, trial, cell) regardless of worker count.
std::vector<TrialRow> run_benchmark(const SuiteConfig& cfg);

void write_benchmark_csv(std::ostream& out, const std::vector<TrialRow>& rows);

/// Per (rate, cell): trial/failure/success counts plus means and medians of
/// every metric over successful runs.
std::string summarize_benchmark(const std::vector<TrialRow>& rows, const SuiteConfig& cfg);

double median(std::vector<double> v);

}  // namespace sulreg
