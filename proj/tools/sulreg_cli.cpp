// Command-line front end: register, synth, bench.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sulreg/benchmark.hpp"
#include "sulreg/io.hpp"
#include "sulreg/metrics.hpp"
#include "sulreg/synthetic.hpp"

using namespace sulreg;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kDegenerate = 3 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return kUsage;
    case ErrorCode::ParseError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::IoError:
      return kParse;
    default:
      return kDegenerate;
  }
}

struct RegisterArgs {
  std::string source, target, corr, gt, out, dump_histograms, dump_sus;
  std::string sigma_mode = "per-eval";
  bool no_ahs = false, no_sus = false;
};

int run_register(const RegisterArgs& a, RansacConfig cfg) {
  cfg.use_ahs_lvlp = !a.no_ahs;
  cfg.use_sus = !a.no_sus;
  cfg.sigma_mode = parse_sigma_mode(a.sigma_mode);
  cfg.validate();

  const auto source = load_point_cloud(a.source);
  const auto target = load_point_cloud(a.target);
  const auto corrs = load_correspondences(a.corr, source, target);
  std::optional<RigidTransform> gt;
  if (!a.gt.empty()) gt = load_transform(a.gt);

  const auto start = std::chrono::steady_clock::now();
  const auto result = run_registration(corrs, source, target, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::optional<MetricsReport> metrics;
  if (gt) {
    // Without labels, P/R/F1 use the inliers of the ground truth itself.
    const auto truth = compute_inliers(*gt, corrs, cfg.residual_threshold);
    metrics = evaluate(source, *gt, result.transform, result.inlier_indices, truth, secs);
  }
  emit_result(result, metrics, a.out);

  if (!a.dump_histograms.empty()) {
    fs::create_directories(a.dump_histograms);
    if (result.angle_histogram) {
      write_histogram_csv(fs::path(a.dump_histograms) / "angle_histogram.csv", *result.angle_histogram);
    }
    if (result.scale_ratio_histogram) {
      write_histogram_csv(fs::path(a.dump_histograms) / "scale_ratio_histogram.csv",
                          *result.scale_ratio_histogram);
    }
  }
  if (!a.dump_sus.empty()) write_sus_csv(a.dump_sus, result.sus_log);
  for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
  return kOk;
}

int run_synth(const SyntheticSpec& spec, const std::string& surface, const std::string& out_dir) {
  SyntheticSpec s = spec;
  s.surface_model = parse_surface_model(surface);
  const auto pair = synthesize_pair(s);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  save_xyz(dir / "source.xyz", pair.source);
  save_xyz(dir / "target.xyz", pair.target);
  save_correspondences(dir / "corr.txt", pair.corrs);
  save_transform(dir / "gt.json", pair.gt);
  std::ofstream labels(dir / "true_inliers.txt");
  for (Index i : pair.true_inliers) labels << i << '\n';
  if (!labels) throw Error(ErrorCode::IoError, "cannot write true_inliers.txt");
  return kOk;
}

int run_bench(SuiteConfig cfg, const std::string& surface, const std::string& csv_path,
              const std::string& summary_path) {
  cfg.scene.surface_model = parse_surface_model(surface);
  const auto rows = run_benchmark(cfg);
  {
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::IoError, "cannot write " + csv_path);
    write_benchmark_csv(csv, rows);
  }
  std::ofstream summary(summary_path);
  if (!summary) throw Error(ErrorCode::IoError, "cannot write " + summary_path);
  summary << summarize_benchmark(rows, cfg) << '\n';
  return kOk;
}

void add_ransac_flags(CLI::App* cmd, RansacConfig& cfg) {
  cmd->add_option("--tr", cfg.residual_threshold, "Residual threshold T_r");
  cmd->add_option("--rmax", cfg.r_max, "Maximal global/local interaction rounds");
  cmd->add_option("--alpha", cfg.alpha_pct, "Percent of L^sul sampled per local run");
  cmd->add_option("--beta", cfg.beta_pct, "Percent of that sample per hypothesis");
  cmd->add_option("--confidence", cfg.confidence, "Target confidence level");
  cmd->add_option("--tau", cfg.noise_bound, "Noise bound of the rotation solver");
  cmd->add_option("--k-normals", cfg.k_normals, "Neighbors for normal estimation");
  cmd->add_option("--max-local-iterations", cfg.max_local_iterations, "Safety cap on local draws");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust point cloud registration with self-updating local sets"};
  app.require_subcommand(1);

  RansacConfig rcfg;
  RegisterArgs ra;
  auto* reg = app.add_subcommand("register", "Register a source cloud onto a target cloud");
  reg->add_option("--source", ra.source, "Source cloud (.xyz/.ply)")->required();
  reg->add_option("--target", ra.target, "Target cloud (.xyz/.ply)")->required();
  reg->add_option("--corr", ra.corr, "Correspondence file")->required();
  reg->add_option("--gt", ra.gt, "Ground-truth transform JSON");
  reg->add_option("--seed", rcfg.seed, "RNG seed")->required();
  reg->add_option("--out", ra.out, "Result JSON path")->required();
  reg->add_option("--dump-histograms", ra.dump_histograms, "Directory for histogram CSVs");
  reg->add_option("--dump-sus", ra.dump_sus, "Directory for self-update logs");
  reg->add_option("--sigma-mode", ra.sigma_mode, "per-eval | per-round | fixed");
  reg->add_flag("--no-ahs", ra.no_ahs, "Disable the angle/length filters");
  reg->add_flag("--no-sus", ra.no_sus, "Disable self-updates");
  add_ransac_flags(reg, rcfg);
  reg->get_option("--tr")->required();

  SyntheticSpec spec;
  std::string synth_surface = "multi-plane", out_dir;
  auto* syn = app.add_subcommand("synth", "Write a synthetic pair with ground truth");
  syn->add_option("--points", spec.n_points)->required();
  syn->add_option("--corrs", spec.n_correspondences)->required();
  syn->add_option("--outlier-rate", spec.outlier_rate)->required();
  syn->add_option("--noise", spec.noise_sigma)->required();
  syn->add_option("--seed", spec.seed)->required();
  syn->add_option("--out-dir", out_dir)->required();
  syn->add_option("--rotation-deg", spec.rotation_magnitude_deg);
  syn->add_option("--translation", spec.translation_magnitude);
  syn->add_option("--extent", spec.scene_extent);
  syn->add_option("--surface", synth_surface, "random-blobs | multi-plane");
  syn->add_option("--tr", spec.residual_threshold, "Label threshold");

  SuiteConfig suite;
  std::string bench_surface = "multi-plane", csv_path, summary_path, sigma_mode = "per-eval";
  auto* ben = app.add_subcommand("bench", "Seeded synthetic benchmark / ablation");
  ben->add_option("--outlier-rates", suite.outlier_rates)->delimiter(',');
  ben->add_option("--trials", suite.trials);
  ben->add_option("--seed", suite.seed)->required();
  ben->add_flag("--ablate", suite.ablate);
  ben->add_option("--csv", csv_path)->required();
  ben->add_option("--summary", summary_path)->required();
  ben->add_option("--workers", suite.workers);
  ben->add_option("--points", suite.scene.n_points);
  ben->add_option("--corrs", suite.scene.n_correspondences);
  ben->add_option("--noise", suite.scene.noise_sigma);
  ben->add_option("--rotation-deg", suite.scene.rotation_magnitude_deg);
  ben->add_option("--translation", suite.scene.translation_magnitude);
  ben->add_option("--surface", bench_surface);
  ben->add_option("--sigma-mode", sigma_mode);
  add_ransac_flags(ben, suite.ransac);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*reg) return run_register(ra, rcfg);
    if (*syn) return run_synth(spec, synth_surface, out_dir);
    suite.scene.residual_threshold = suite.ransac.residual_threshold;
    suite.ransac.sigma_mode = parse_sigma_mode(sigma_mode);
    return run_bench(suite, bench_surface, csv_path, summary_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDegenerate;
  }
}
