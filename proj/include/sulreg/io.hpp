#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "sulreg/dual_ransac.hpp"
#include "sulreg/metrics.hpp"
#include "sulreg/types.hpp"

namespace sulreg {

namespace fs = std::filesystem;

/// .xyz ("x y z" per line, '#' comments, extra columns ignored) or ASCII
/// .ply. Throws ParseError (with line number), UnsupportedFormat, IoError.
PointCloud load_point_cloud(const fs::path& path);
PointCloud parse_xyz(std::istream& in);
PointCloud parse_ply(std::istream& in);

/// 17 significant digits, one point per line.
void save_xyz(const fs::path& path, std::span<const Vec3> cloud);

/// Lines are either "i j" (indices into source/target) or six floats
/// "sx sy sz tx ty tz"; the first data line decides.
CorrespondenceSet load_correspondences(const fs::path& path, std::span<const Vec3> source,
                                       std::span<const Vec3> target);
CorrespondenceSet parse_correspondences(std::istream& in, std::span<const Vec3> source,
                                        std::span<const Vec3> target);

enum class CorrespondenceFormat { Indices, Coordinates };

void save_correspondences(const fs::path& path, const CorrespondenceSet& corrs);
void save_correspondence_indices(const fs::path& path,
                                 std::span<const std::pair<Index, Index>> pairs);

/// {"rotation": [9 row-major], "translation": [3]}
RigidTransform load_transform(const fs::path& path);
void save_transform(const fs::path& path, const RigidTransform& t);

std::string result_to_json(const RegistrationResult& result,
                           const std::optional<MetricsReport>& metrics);
void emit_result(const RegistrationResult& result, const std::optional<MetricsReport>& metrics,
                 const fs::path& path);

/// Inverse of result_to_json for the fields it writes.
struct ParsedResult {
  RigidTransform transform;
  int rounds = 0;
  std::uint64_t total_iterations = 0;
  double final_confidence = 0.0;
  IndexSet inlier_indices;
  std::optional<MetricsReport> metrics;
  std::vector<RoundTrace> trace;
};
ParsedResult parse_result(const std::string& json_text);

/// bin_low,bin_high,count
void write_histogram_csv(const fs::path& path, const HistogramDump& h);

/// One file per self-update round: index,action,rule,probability,threshold
void write_sus_csv(const fs::path& dir, const std::vector<std::vector<SusDecision>>& log);

}  // namespace sulreg
