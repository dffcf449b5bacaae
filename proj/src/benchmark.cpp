#include "sulreg/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

#include <omp.h>

#include "json.hpp"
#include "sulreg/random.hpp"

namespace sulreg {

std::vector<AblationCell> ablation_cells(bool ablate) {
  if (!ablate) return {{true, true}};
  return {{false, false}, {false, true}, {true, false}, {true, true}};
}

void SuiteConfig::validate() const {
  if (outlier_rates.empty()) throw Error(ErrorCode::InvalidArgument, "no outlier rates");
  for (double r : outlier_rates) {
    if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "outlier rate outside [0, 1)");
  }
  if (trials <= 0) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  if (workers <= 0) throw Error(ErrorCode::InvalidArgument, "workers must be positive");
  scene.validate();
  ransac.validate();
}

std::uint64_t scene_seed(std::uint64_t suite_seed, std::size_t rate_index, int trial) {
  return combine_seed(combine_seed(suite_seed, rate_index), static_cast<std::uint64_t>(trial));
}

std::uint64_t run_seed(std::uint64_t suite_seed, std::size_t rate_index, int trial,
                       std::size_t cell_index) {
  return combine_seed(scene_seed(suite_seed, rate_index, trial), 0x5eed0000ULL + cell_index);
}

TrialRow run_trial(const SyntheticSpec& scene, const RansacConfig& ransac) {
  TrialRow row;
  row.scene_seed = scene.seed;
  row.run_seed = ransac.seed;
  row.outlier_rate = scene.outlier_rate;
  row.cell = {ransac.use_ahs_lvlp, ransac.use_sus};
  try {
    const auto pair = synthesize_pair(scene);
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_registration(pair.corrs, pair.source, pair.target, ransac);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.metrics = evaluate(pair.source, pair.gt, result.transform, result.inlier_indices,
                           pair.true_inliers, secs);
    row.rounds = result.rounds;
    row.iterations = result.total_iterations;
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<TrialRow> run_benchmark(const SuiteConfig& cfg) {
  cfg.validate();
  const auto cells = ablation_cells(cfg.ablate);
  struct Job {
    std::size_t rate_index;
    int trial;
    std::size_t cell_index;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < cfg.outlier_rates.size(); ++r)
    for (int t = 0; t < cfg.trials; ++t)
      for (std::size_t c = 0; c < cells.size(); ++c) jobs.push_back({r, t, c});

  std::vector<TrialRow> rows(jobs.size());
  // Kernels below stay serial inside a worker.
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const Job& job = jobs[k];
    SyntheticSpec scene = cfg.scene;
    scene.outlier_rate = cfg.outlier_rates[job.rate_index];
    scene.seed = scene_seed(cfg.seed, job.rate_index, job.trial);
    RansacConfig rc = cfg.ransac;
    rc.seed = run_seed(cfg.seed, job.rate_index, job.trial, job.cell_index);
    rc.use_ahs_lvlp = cells[job.cell_index].ahs_lvlp;
    rc.use_sus = cells[job.cell_index].sus;
    rows[k] = run_trial(scene, rc);
    rows[k].trial = job.trial;
  }
  return rows;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_benchmark_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "scene_seed,run_seed,outlier_rate,trial,ahs_lvlp,sus,ok,r_err_deg,t_err,rmse,mese,"
         "precision,recall,f1,rounds,iterations,error,time_s\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.scene_seed << ',' << r.run_seed << ',' << num(r.outlier_rate) << ',' << r.trial << ','
        << int(r.cell.ahs_lvlp) << ',' << int(r.cell.sus) << ',' << int(r.ok) << ','
        << num(m.rotation_error_deg) << ',' << num(m.translation_error) << ',' << num(m.rmse)
        << ',' << num(m.mese) << ',' << num(m.precision) << ',' << num(m.recall) << ','
        << num(m.f1) << ',' << r.rounds << ',' << r.iterations << ',' << csv_escape(r.error) << ','
        << num(m.runtime_seconds) << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string summarize_benchmark(const std::vector<TrialRow>& rows, const SuiteConfig& cfg) {
  using ordered_json = nlohmann::ordered_json;
  struct Acc {
    std::size_t trials = 0, failures = 0, successes = 0;
    std::map<std::string, std::vector<double>> values;
  };
  std::map<std::tuple<double, bool, bool>, Acc> cells;
  for (const auto& r : rows) {
    auto& a = cells[{r.outlier_rate, r.cell.ahs_lvlp, r.cell.sus}];
    ++a.trials;
    if (!r.ok) {
      ++a.failures;
      continue;
    }
    if (r.success(cfg.success_rotation_deg, cfg.success_translation)) ++a.successes;
    const auto& m = r.metrics;
    a.values["r_err_deg"].push_back(m.rotation_error_deg);
    a.values["t_err"].push_back(m.translation_error);
    a.values["rmse"].push_back(m.rmse);
    a.values["mese"].push_back(m.mese);
    a.values["precision"].push_back(m.precision);
    a.values["recall"].push_back(m.recall);
    a.values["f1"].push_back(m.f1);
    a.values["time_s"].push_back(m.runtime_seconds);
    a.values["rounds"].push_back(r.rounds);
    a.values["iterations"].push_back(static_cast<double>(r.iterations));
  }
  ordered_json out = ordered_json::array();
  for (const auto& [key, a] : cells) {
    ordered_json cell{{"outlier_rate", std::get<0>(key)},
                      {"ahs_lvlp", std::get<1>(key)},
                      {"sus", std::get<2>(key)},
                      {"trials", a.trials},
                      {"failures", a.failures},
                      {"successes", a.successes},
                      {"success_rate", a.trials ? double(a.successes) / double(a.trials) : 0.0}};
    ordered_json mean = ordered_json::object(), med = ordered_json::object();
    for (const auto& [name, v] : a.values) {
      double s = 0.0;
      for (double x : v) s += x;
      mean[name] = v.empty() ? 0.0 : s / double(v.size());
      med[name] = median(v);
    }
    cell["mean"] = mean;
    cell["median"] = med;
    out.push_back(cell);
  }
  return ordered_json{{"seed", cfg.seed}, {"trials", cfg.trials}, {"cells", out}}.dump(2);
}

}  // namespace sulreg
