#include "sulreg/local_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sulreg/kernels.hpp"

namespace sulreg {

namespace {

// A spread this small relative to the value range means the values are
// identical up to round-off; binning them would only allocate empty bins.
void check_bin_budget(double bins, std::size_t items) {
  const double budget = std::max(1024.0, 8.0 * static_cast<double>(items));
  if (!(bins <= budget)) {
    throw Error(ErrorCode::DegenerateDistribution, "spread too small for the value range");
  }
}

}  // namespace

std::size_t Histogram::bin_of(double v) const {
  const double pos = std::floor((v - lower_bound) / bin_width);
  if (!(pos > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(std::min(pos, static_cast<double>(counts.size())));
  return std::min(b, counts.size() - 1);
}

Histogram Histogram::build(std::span<const double> values, double lower_bound, double bin_width,
                           std::size_t bins) {
  Histogram h;
  h.lower_bound = lower_bound;
  h.bin_width = bin_width;
  h.counts.assign(std::max<std::size_t>(bins, 1), 0);
  h.bin_members.assign(h.counts.size(), {});
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t b = h.bin_of(values[i]);
    ++h.counts[b];
    h.bin_members[b].push_back(i);
  }
  return h;
}

double correspondence_angle(const Correspondence& c) {
  if (!c.source_normal || !c.target_normal) {
    throw Error(ErrorCode::MissingNormals, "correspondence has no normals");
  }
  const double d = c.source_normal->dot(*c.target_normal);
  return std::acos(std::clamp(d, -1.0, 1.0));
}

double scotts_bin_width(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::DegenerateDistribution, "need at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0)) throw Error(ErrorCode::DegenerateDistribution, "zero spread");
  return 3.49 * sigma / std::cbrt(static_cast<double>(n));
}

Histogram build_angle_histogram(const CorrespondenceSet& corrs) {
  std::vector<double> angles;
  angles.reserve(corrs.size());
  for (const auto& c : corrs) angles.push_back(correspondence_angle(c));
  const double w = scotts_bin_width(angles);
  const double bins = std::ceil(std::numbers::pi / w);
  check_bin_budget(bins, angles.size());
  return Histogram::build(angles, 0.0, w, static_cast<std::size_t>(bins));
}

double frequency_threshold(const Histogram& hist) {
  const auto n = static_cast<double>(hist.counts.size());
  double mean = 0.0;
  for (auto c : hist.counts) mean += static_cast<double>(c);
  mean /= n;
  double var = 0.0;
  for (auto c : hist.counts) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  return mean + std::sqrt(var / n);
}

IndexSet ahs_filter(const Histogram& hist) {
  const double threshold = frequency_threshold(hist);
  IndexSet out;
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    if (static_cast<double>(hist.counts[b]) > threshold) {
      out.insert(out.end(), hist.bin_members[b].begin(), hist.bin_members[b].end());
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyResult, "no histogram bin exceeds the threshold");
  std::sort(out.begin(), out.end());
  return out;
}

LineVectorBuild build_line_vectors(const CorrespondenceSet& corrs, std::span<const Index> members) {
  if (members.size() < 2) {
    throw Error(ErrorCode::TooFewCorrespondences, "line vectors need at least two correspondences");
  }
  auto pv = kernels::build_pair_vectors(corrs, members);
  return {std::move(pv.vectors), pv.skipped};
}

RatioRange RatioRange::unbounded() {
  RatioRange r;
  r.kind_ = Kind::Unbounded;
  r.low_ = 0.0;
  r.high_ = std::numeric_limits<double>::infinity();
  return r;
}

RatioRange RatioRange::single(double ratio) { return closed(ratio, ratio); }

RatioRange RatioRange::closed(double low, double high) {
  RatioRange r;
  r.kind_ = Kind::Closed;
  r.low_ = low;
  r.high_ = high;
  return r;
}

RatioRange RatioRange::bins(double lower_bound, double bin_width, std::size_t first_bin,
                            std::size_t last_bin, std::size_t bin_count) {
  RatioRange r;
  r.kind_ = Kind::Bins;
  r.lower_bound_ = lower_bound;
  r.bin_width_ = bin_width;
  r.first_bin_ = first_bin;
  r.last_bin_ = last_bin;
  r.bin_count_ = bin_count;
  r.low_ = lower_bound + static_cast<double>(first_bin) * bin_width;
  r.high_ = lower_bound + static_cast<double>(last_bin + 1) * bin_width;
  return r;
}

bool RatioRange::contains(double ratio) const {
  switch (kind_) {
    case Kind::Unbounded: return true;
    case Kind::Closed: return ratio >= low_ && ratio <= high_;
    case Kind::Bins: {
      // Same arithmetic as Histogram::bin_of; values outside the histogram
      // span are rejected instead of clamped.
      const double pos = std::floor((ratio - lower_bound_) / bin_width_);
      if (pos < 0.0) return false;
      if (pos >= static_cast<double>(bin_count_)) return false;
      const auto b = static_cast<std::size_t>(pos);
      return b >= first_bin_ && b <= last_bin_;
    }
  }
  return false;
}

Histogram build_scale_ratio_histogram(std::span<const LineVector> lvs) {
  std::vector<double> ratios;
  ratios.reserve(lvs.size());
  for (const auto& lv : lvs) ratios.push_back(lv.scale_ratio);
  const double w = scotts_bin_width(ratios);
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double bins = std::floor((*hi - *lo) / w) + 1.0;
  check_bin_budget(bins, ratios.size());
  return Histogram::build(ratios, *lo, w, static_cast<std::size_t>(bins));
}

LvlpResult lvlp_filter(std::span<const LineVector> lvs) {
  if (lvs.empty()) throw Error(ErrorCode::InvalidArgument, "lvlp_filter: no line vectors");
  LvlpResult out;
  try {
    out.histogram = build_scale_ratio_histogram(lvs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDistribution) throw;
    out.vectors.assign(lvs.begin(), lvs.end());
    const auto [lo, hi] = std::minmax_element(
        lvs.begin(), lvs.end(),
        [](const LineVector& a, const LineVector& b) { return a.scale_ratio < b.scale_ratio; });
    out.range = RatioRange::closed(lo->scale_ratio, hi->scale_ratio);
    return out;
  }
  const auto& counts = out.histogram.counts;
  const std::size_t peak = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());  // first max wins
  const std::size_t first = peak == 0 ? 0 : peak - 1;
  const std::size_t last = std::min(peak + 1, counts.size() - 1);
  out.peak_bin = peak;
  out.range = RatioRange::bins(out.histogram.lower_bound, out.histogram.bin_width, first, last,
                               counts.size());

  std::vector<char> keep(lvs.size(), 0);
  for (std::size_t b = first; b <= last; ++b) {
    for (Index m : out.histogram.bin_members[b]) keep[m] = 1;
  }
  for (std::size_t m = 0; m < lvs.size(); ++m) {
    if (keep[m]) out.vectors.push_back(lvs[m]);
  }
  return out;
}

}  // namespace sulreg
