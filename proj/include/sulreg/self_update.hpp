#pragma once

#include <span>
#include <string_view>

#include "sulreg/local_sets.hpp"
#include "sulreg/types.hpp"

namespace sulreg {

enum class SusAction { Include, Remove, Keep, Skip };
enum class SusRule { Rule1, Rule2, Rule3, AlwaysOutlier, NotApplicable };

const char* to_string(SusAction a);
const char* to_string(SusRule r);

/// Audit record of one self-update classification.
struct SusDecision {
  Index correspondence_index = 0;
  SusAction action = SusAction::Keep;
  std::optional<double> probability;
  std::optional<double> threshold_drawn;
  SusRule rule = SusRule::NotApplicable;
};

/// How the residual scale of the inlier probability is chosen.
enum class SigmaMode {
  PerEvaluation,  // fresh draw from (0, T_r] for every probability
  PerRound,       // one draw from (0, T_r] per self-update round
  Fixed,          // constant (T_r / 2 unless overridden)
};

SigmaMode parse_sigma_mode(std::string_view s);
const char* to_string(SigmaMode m);

class SigmaSource {
 public:
  SigmaSource(SigmaMode mode, double residual_threshold);
  static SigmaSource fixed(double sigma);

  /// Redraws the per-round value (PerRound mode only).
  void begin_round(Rng& rng);
  double draw(Rng& rng);

  SigmaMode mode() const noexcept { return mode_; }

 private:
  SigmaMode mode_;
  double threshold_;
  double current_;
};

/// 1 - gamma_lower(3/2, r^2 / (2 sigma^2)) / Gamma(3/2): the chance that a
/// 3-D Gaussian residual with scale sigma is at least r.
double true_inlier_probability(double r, double sigma);

/// n / 100 for n uniform in [1, 100].
double draw_mersenne_threshold(Rng& rng);

/// Inclusion test for correspondences in the global inlier set but outside
/// the local set. Rule 1 consumes no randomness.
SusDecision classify_inclusion(const Correspondence& c, Index index, bool in_ir_glo, bool in_c_sul,
                               double residual_threshold, SigmaSource& sigma, Rng& rng);

/// Removal test for local-set members outside the global inlier set.
SusDecision classify_removal(const Correspondence& c, Index index, bool in_ir_glo, bool in_c_sul,
                             double residual_threshold, SigmaSource& sigma, Rng& rng);

struct SusOutcome {
  IndexSet c_sul;
  LineVectorSet l_sul;
  std::vector<SusDecision> decisions;  // removals first, then inclusions, each ascending
  std::size_t included = 0;
  std::size_t removed = 0;
};

/// One self-update round. Residuals of every correspondence must already be
/// refreshed under the current global transform. Removed members take all
/// their incident line vectors with them; each included correspondence is
/// paired with every surviving member and the new vectors are kept when
/// their scale ratio lies in `range`.
SusOutcome apply_sus(const CorrespondenceSet& corrs, const IndexSet& c_sul,
                     const LineVectorSet& l_sul, const IndexSet& ir_glo,
                     double residual_threshold, const RatioRange& range, SigmaSource& sigma,
                     Rng& rng);

}  // namespace sulreg
