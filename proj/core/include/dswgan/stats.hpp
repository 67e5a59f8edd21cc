#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dswgan/rng.hpp"
#include "dswgan/types.hpp"

namespace dswgan {

struct SummaryStats {
  std::vector<double> marginal_mean;       // per interval
  std::vector<double> marginal_variance;   // unbiased, per interval
  std::vector<double> past_future_corr;    // j = 1..p-1
  std::vector<bool> corr_degenerate;       // zero-variance aggregates reported as 0
};

// Marginal moments plus the Pearson correlation between the first j and the
// remaining p-j interval totals, for every split point. Needs >= 2 rows.
SummaryStats summarize(const CountMatrix& data);

struct CleanResult {
  CountMatrix kept;
  std::vector<int> removed_rows;  // 0-based indices into the input
};

// Removes every row with any coordinate strictly outside the per-column
// [lower, upper] type-7 percentile band computed on the full data.
CleanResult clean_outliers(const CountMatrix& data, double lower = 0.025, double upper = 0.975);

struct SplitResult {
  CountMatrix train;
  CountMatrix test;
};

// Random partition without replacement; train gets ceil(n * a/(a+b)) rows.
// Row order within each part follows the input.
SplitResult split(const CountMatrix& data, int ratio_train, int ratio_test, RngStream& stream);

struct Band {
  std::vector<double> center;     // mean across macro reps
  std::vector<double> normal_lo;  // center -/+ 1.96 sd/sqrt(macro_reps)
  std::vector<double> normal_hi;
  std::vector<double> pct_lo;     // 2.5/97.5 percentile across macro reps
  std::vector<double> pct_hi;
};

struct CIBands {
  int macro_reps = 0;
  Band marginal_mean;
  Band marginal_variance;
  Band past_future_corr;
};

// Calls the generator macro_reps times for n_per_rep days each, summarizes
// every batch, and turns the per-statistic spread into normal-approximation
// and percentile 95% bands.
CIBands ci_bands(const std::function<CountMatrix(int rep)>& generate, int n_per_rep,
                 int macro_reps = 100);

void save_summary_csv(const std::string& path, const SummaryStats& stats);

}  // namespace dswgan
