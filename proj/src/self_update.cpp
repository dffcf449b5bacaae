#include "sulreg/self_update.hpp"

#include <cmath>
#include <numbers>

#include "sulreg/kernels.hpp"
#include "sulreg/random.hpp"

namespace sulreg {

const char* to_string(SusAction a) {
  switch (a) {
    case SusAction::Include: return "include";
    case SusAction::Remove: return "remove";
    case SusAction::Keep: return "keep";
    case SusAction::Skip: return "skip";
  }
  return "?";
}

const char* to_string(SusRule r) {
  switch (r) {
    case SusRule::Rule1: return "rule1";
    case SusRule::Rule2: return "rule2";
    case SusRule::Rule3: return "rule3";
    case SusRule::AlwaysOutlier: return "always-outlier";
    case SusRule::NotApplicable: return "n/a";
  }
  return "?";
}

SigmaMode parse_sigma_mode(std::string_view s) {
  if (s == "per-eval") return SigmaMode::PerEvaluation;
  if (s == "per-round") return SigmaMode::PerRound;
  if (s == "fixed-half-Tr" || s == "fixed") return SigmaMode::Fixed;
  throw Error(ErrorCode::InvalidArgument, "unknown sigma mode: " + std::string(s));
}

const char* to_string(SigmaMode m) {
  switch (m) {
    case SigmaMode::PerEvaluation: return "per-eval";
    case SigmaMode::PerRound: return "per-round";
    case SigmaMode::Fixed: return "fixed-half-Tr";
  }
  return "?";
}

SigmaSource::SigmaSource(SigmaMode mode, double residual_threshold)
    : mode_(mode), threshold_(residual_threshold), current_(0.5 * residual_threshold) {
  if (!(residual_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "residual threshold must be positive");
  }
}

SigmaSource SigmaSource::fixed(double sigma) {
  SigmaSource s(SigmaMode::Fixed, 2.0 * sigma);
  return s;
}

void SigmaSource::begin_round(Rng& rng) {
  if (mode_ == SigmaMode::PerRound) current_ = threshold_ * (1.0 - uniform01(rng));
}

double SigmaSource::draw(Rng& rng) {
  if (mode_ == SigmaMode::PerEvaluation) return threshold_ * (1.0 - uniform01(rng));
  return current_;
}

double true_inlier_probability(double r, double sigma) {
  // Q(3/2, x) = erfc(sqrt(x)) + 2 sqrt(x / pi) exp(-x)
  const double x = (r * r) / (2.0 * sigma * sigma);
  if (x == 0.0) return 1.0;
  const double q = std::erfc(std::sqrt(x)) + 2.0 * std::sqrt(x / std::numbers::pi) * std::exp(-x);
  return std::clamp(q, 0.0, 1.0);
}

double draw_mersenne_threshold(Rng& rng) {
  return static_cast<double>(uniform_index(rng, 100) + 1) / 100.0;
}

namespace {

double require_current(const Correspondence& c, Index index) {
  if (!c.curr_residual) {
    throw Error(ErrorCode::MissingResidual,
                "correspondence " + std::to_string(index) + " has no current residual");
  }
  return *c.curr_residual;
}

}  // namespace

SusDecision classify_inclusion(const Correspondence& c, Index index, bool in_ir_glo, bool in_c_sul,
                               double residual_threshold, SigmaSource& sigma, Rng& rng) {
  SusDecision d;
  d.correspondence_index = index;
  if (!in_ir_glo || in_c_sul) return d;
  const double curr = require_current(c, index);
  if (!(curr < residual_threshold)) return d;

  if (c.prev_residual && *c.prev_residual < residual_threshold) {
    d.action = SusAction::Include;
    d.rule = SusRule::Rule1;
    d.probability = 1.0;
    return d;
  }
  // Previously an outlier, or first round.
  const double p = true_inlier_probability(curr, sigma.draw(rng));
  const double threshold = draw_mersenne_threshold(rng);
  d.rule = SusRule::Rule2;
  d.probability = p;
  d.threshold_drawn = threshold;
  d.action = p > threshold ? SusAction::Include : SusAction::Skip;
  return d;
}

SusDecision classify_removal(const Correspondence& c, Index index, bool in_ir_glo, bool in_c_sul,
                             double residual_threshold, SigmaSource& sigma, Rng& rng) {
  SusDecision d;
  d.correspondence_index = index;
  if (!in_c_sul || in_ir_glo) return d;
  const double curr = require_current(c, index);
  if (curr < residual_threshold) return d;

  if (c.prev_residual && *c.prev_residual >= residual_threshold) {
    d.action = SusAction::Remove;
    d.rule = SusRule::AlwaysOutlier;
    return d;
  }
  // Previously an inlier, or first round.
  const double p = true_inlier_probability(curr, sigma.draw(rng));
  const double threshold = draw_mersenne_threshold(rng);
  d.rule = SusRule::Rule3;
  d.probability = p;
  d.threshold_drawn = threshold;
  d.action = (1.0 - p) > threshold ? SusAction::Remove : SusAction::Keep;
  return d;
}

SusOutcome apply_sus(const CorrespondenceSet& corrs, const IndexSet& c_sul,
                     const LineVectorSet& l_sul, const IndexSet& ir_glo,
                     double residual_threshold, const RatioRange& range, SigmaSource& sigma,
                     Rng& rng) {
  const std::size_t n = corrs.size();
  std::vector<char> in_sul(n, 0);
  std::vector<char> in_ir(n, 0);
  for (Index i : c_sul) in_sul.at(i) = 1;
  for (Index i : ir_glo) in_ir.at(i) = 1;

  SusOutcome out;
  std::vector<char> removed(n, 0);
  for (Index i : c_sul) {
    if (in_ir[i]) continue;
    auto d = classify_removal(corrs[i], i, false, true, residual_threshold, sigma, rng);
    if (d.action == SusAction::Remove) {
      removed[i] = 1;
      ++out.removed;
    }
    out.decisions.push_back(d);
  }
  IndexSet included;
  for (Index i : ir_glo) {
    if (in_sul[i]) continue;
    auto d = classify_inclusion(corrs[i], i, true, false, residual_threshold, sigma, rng);
    if (d.action == SusAction::Include) included.push_back(i);
    out.decisions.push_back(d);
  }
  out.included = included.size();

  IndexSet members;
  members.reserve(c_sul.size() + included.size());
  for (Index i : c_sul) {
    if (!removed[i]) members.push_back(i);
  }

  out.l_sul.reserve(l_sul.size());
  for (const auto& lv : l_sul) {
    if (!removed[lv.i] && !removed[lv.j]) out.l_sul.push_back(lv);
  }
  for (Index c : included) {
    for (Index m : members) {
      auto lv = kernels::make_line_vector(corrs, c, m);
      if (lv && range.contains(lv->scale_ratio)) out.l_sul.push_back(*lv);
    }
    members.push_back(c);
  }
  std::sort(members.begin(), members.end());
  out.c_sul = std::move(members);
  return out;
}

}  // namespace sulreg
