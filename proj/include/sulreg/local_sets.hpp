#pragma once

#include <span>

#include "sulreg/types.hpp"

namespace sulreg {

/// Fixed-width histogram that remembers which items fell in each bin.
struct Histogram {
  double lower_bound = 0.0;
  double bin_width = 1.0;
  std::vector<std::size_t> counts;
  std::vector<std::vector<Index>> bin_members;  // item positions in the input sequence

  std::size_t bin_count() const noexcept { return counts.size(); }
  double bin_low(std::size_t b) const { return lower_bound + static_cast<double>(b) * bin_width; }
  double bin_high(std::size_t b) const { return lower_bound + static_cast<double>(b + 1) * bin_width; }

  /// floor((v - lower_bound) / bin_width), clamped into [0, bin_count).
  std::size_t bin_of(double v) const;

  /// Bins `values` into `bins` bins starting at lower_bound.
  static Histogram build(std::span<const double> values, double lower_bound, double bin_width,
                         std::size_t bins);
};

/// arccos(clamp(N_x . N_y)) in [0, pi]. Throws MissingNormals.
double correspondence_angle(const Correspondence& c);

/// Scott's rule 3.49 * sigma / cbrt(n) with the population standard
/// deviation. Throws DegenerateDistribution when n < 2 or sigma == 0.
double scotts_bin_width(std::span<const double> values);

/// Angle histogram over [0, pi) with ceil(pi / w) bins; an angle of exactly
/// pi goes to the last bin. Members are correspondence indices.
Histogram build_angle_histogram(const CorrespondenceSet& corrs);

/// Frequency threshold: mean + population std of the per-bin counts.
double frequency_threshold(const Histogram& hist);

/// Union of the members of every bin whose count is strictly greater than
/// frequency_threshold(hist), ascending. Throws EmptyResult if no bin
/// qualifies.
IndexSet ahs_filter(const Histogram& hist);

struct LineVectorBuild {
  LineVectorSet vectors;   // lexicographic (i, j)
  std::size_t skipped = 0; // zero-length source or target difference
};

/// All pairs i < j over `members` (indices into corrs). Throws
/// TooFewCorrespondences for fewer than two members.
LineVectorBuild build_line_vectors(const CorrespondenceSet& corrs, std::span<const Index> members);

/// Scale-ratio interval retained by the length-preservation filter,
/// represented by the histogram bins it spans so that membership tests are
/// bit-consistent with the original binning.
class RatioRange {
 public:
  /// Everything passes.
  static RatioRange unbounded();
  /// Only `ratio` itself passes.
  static RatioRange single(double ratio);
  /// low <= ratio <= high.
  static RatioRange closed(double low, double high);
  static RatioRange bins(double lower_bound, double bin_width, std::size_t first_bin,
                         std::size_t last_bin, std::size_t bin_count);

  bool contains(double ratio) const;
  double low() const noexcept { return low_; }
  double high() const noexcept { return high_; }
  bool is_unbounded() const noexcept { return kind_ == Kind::Unbounded; }

 private:
  enum class Kind { Unbounded, Closed, Bins };
  Kind kind_ = Kind::Unbounded;
  double lower_bound_ = 0.0;
  double bin_width_ = 1.0;
  std::size_t first_bin_ = 0;
  std::size_t last_bin_ = 0;
  std::size_t bin_count_ = 0;
  double low_ = 0.0;
  double high_ = 0.0;
};

/// Scale-ratio histogram over [min ratio, max ratio] with Scott's width.
/// Throws DegenerateDistribution like scotts_bin_width.
Histogram build_scale_ratio_histogram(std::span<const LineVector> lvs);

struct LvlpResult {
  LineVectorSet vectors;
  RatioRange range;
  Histogram histogram;  // empty when the ratios were degenerate
  std::size_t peak_bin = 0;
};

/// Keeps the line vectors in the tallest scale-ratio bin (lowest index on
/// ties) and its immediate neighbors. Degenerate ratio spreads keep everything
/// with the closed [min, max] range. Throws InvalidArgument on empty input.
LvlpResult lvlp_filter(std::span<const LineVector> lvs);

}  // namespace sulreg
