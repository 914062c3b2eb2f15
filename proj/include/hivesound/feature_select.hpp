#pragma once

#include <string>
#include <vector>

#include "hivesound/features.hpp"

namespace hivesound {

enum class SelectionMethod { KendallTau, AnovaF };

std::string to_string(SelectionMethod m);
SelectionMethod parse_selection_method(const std::string& text);

// Kendall's tau over all pairs: (C - D) / (C + D), ties counted in neither.
// Computed with merge-sort inversion counting; equal to the O(n^2) pair
// enumeration. Throws when every pair is tied (C + D == 0).
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// One-way ANOVA F for two groups:
// (SS_between / (k-1)) / (SS_within / (n-k)).
// Returns +infinity when the groups are perfectly separated (zero
// within-group variance with distinct means); throws when a class is
// absent or both groups are constant and equal.
double anova_f(const std::vector<double>& values, const std::vector<int>& groups);

struct ScoredFeature {
  std::string name;
  double score = 0.0;
  bool ok = true;
  std::string error;  // set when the scorer failed on this feature
};

// Ranking over all features of a table. Tau is ranked by signed value,
// F by magnitude; ties and failed features keep canonical column order
// (failed features sort last).
struct SelectionReport {
  SelectionMethod method = SelectionMethod::AnovaF;
  std::vector<ScoredFeature> ranking;  // descending
};

// Labels are encoded Bee=0, NoBee=1 for both statistics. Per-feature
// scorer failures are recorded in the report, not fatal.
SelectionReport rank_features(const FeatureTable& table, SelectionMethod method);

// Top-k features of the ranking, original row order preserved; columns are
// re-canonicalized to the standard feature order.
FeatureTable select_k_best(const FeatureTable& table, int k,
                           SelectionMethod method = SelectionMethod::AnovaF);

// The fixed 26-feature operating set: spectral_bandwidth, spectral_centroid,
// rolloff, zero_crossing_rate, rmse, chroma_stft, mfcc1..mfcc20.
const std::vector<std::string>& preferred_feature_set();

// CSV export `feature,score,rank`; failed features carry score nan.
void write_selection_csv(const SelectionReport& report, const std::string& path);

}  // namespace hivesound
