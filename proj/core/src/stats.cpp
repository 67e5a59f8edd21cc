#include "dswgan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "dswgan/mathx.hpp"

namespace dswgan {

SummaryStats summarize(const CountMatrix& data) {
  data.validate();
  const int n = data.num_days();
  const int p = data.num_intervals();
  if (n < 2) throw std::invalid_argument("summarize: need at least two days");

  SummaryStats s;
  s.marginal_mean.assign(static_cast<std::size_t>(p), 0.0);
  s.marginal_variance.assign(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < p; ++j) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m += static_cast<double>(data.days[i][j]);
    m /= n;
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = static_cast<double>(data.days[i][j]) - m;
      v += d * d;
    }
    s.marginal_mean[static_cast<std::size_t>(j)] = m;
    s.marginal_variance[static_cast<std::size_t>(j)] = v / (n - 1);
  }

  // Past/future split totals per row, prefix sums reused across split points.
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  std::vector<double> past(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    totals[static_cast<std::size_t>(i)] =
        static_cast<double>(std::accumulate(data.days[i].begin(), data.days[i].end(), std::int64_t{0}));

  s.past_future_corr.assign(static_cast<std::size_t>(p - 1), 0.0);
  s.corr_degenerate.assign(static_cast<std::size_t>(p - 1), false);
  for (int j = 1; j < p; ++j) {
    double mean_past = 0.0, mean_fut = 0.0;
    for (int i = 0; i < n; ++i) {
      past[static_cast<std::size_t>(i)] += static_cast<double>(data.days[i][j - 1]);
      mean_past += past[static_cast<std::size_t>(i)];
      mean_fut += totals[static_cast<std::size_t>(i)] - past[static_cast<std::size_t>(i)];
    }
    mean_past /= n;
    mean_fut /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dx = past[static_cast<std::size_t>(i)] - mean_past;
      const double dy = (totals[static_cast<std::size_t>(i)] - past[static_cast<std::size_t>(i)]) - mean_fut;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
      s.past_future_corr[static_cast<std::size_t>(j - 1)] = 0.0;
      s.corr_degenerate[static_cast<std::size_t>(j - 1)] = true;
    } else {
      s.past_future_corr[static_cast<std::size_t>(j - 1)] = sxy / std::sqrt(sxx * syy);
    }
  }
  return s;
}

CleanResult clean_outliers(const CountMatrix& data, double lower, double upper) {
  data.validate();
  const int n = data.num_days();
  const int p = data.num_intervals();
  if (n < 10) throw std::invalid_argument("clean_outliers: need at least 10 days");
  if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
    throw std::invalid_argument("clean_outliers: percentile bounds out of order");

  std::vector<double> lo(static_cast<std::size_t>(p)), hi(static_cast<std::size_t>(p));
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = static_cast<double>(data.days[i][j]);
    std::sort(col.begin(), col.end());
    lo[static_cast<std::size_t>(j)] = quantile_type7_sorted(col, lower);
    hi[static_cast<std::size_t>(j)] = quantile_type7_sorted(col, upper);
  }

  CleanResult res;
  res.kept.horizon = data.horizon;
  for (int i = 0; i < n; ++i) {
    bool outlier = false;
    for (int j = 0; j < p && !outlier; ++j) {
      const double x = static_cast<double>(data.days[i][j]);
      if (x < lo[static_cast<std::size_t>(j)] || x > hi[static_cast<std::size_t>(j)]) outlier = true;
    }
    if (outlier)
      res.removed_rows.push_back(i);
    else
      res.kept.days.push_back(data.days[i]);
  }
  if (res.kept.days.empty()) throw std::runtime_error("clean_outliers: every row was removed");
  return res;
}

SplitResult split(const CountMatrix& data, int ratio_train, int ratio_test, RngStream& stream) {
  data.validate();
  const int n = data.num_days();
  if (n < 3) throw std::invalid_argument("split: need at least three days");
  if (ratio_train < 1 || ratio_test < 1)
    throw std::invalid_argument("split: ratio parts must be >= 1");
  const int n_train = static_cast<int>(std::ceil(
      static_cast<double>(n) * ratio_train / static_cast<double>(ratio_train + ratio_test)));

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int k = static_cast<int>(stream.next_uniform() * (i + 1));
    if (k > i) k = i;
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]);
  }
  std::vector<int> train_idx(idx.begin(), idx.begin() + n_train);
  std::vector<int> test_idx(idx.begin() + n_train, idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  SplitResult res;
  res.train.horizon = data.horizon;
  res.test.horizon = data.horizon;
  for (int i : train_idx) res.train.days.push_back(data.days[static_cast<std::size_t>(i)]);
  for (int i : test_idx) res.test.days.push_back(data.days[static_cast<std::size_t>(i)]);
  return res;
}

namespace {

Band band_from_reps(const std::vector<std::vector<double>>& reps) {
  const std::size_t coords = reps.front().size();
  const std::size_t m = reps.size();
  Band b;
  b.center.resize(coords);
  b.normal_lo.resize(coords);
  b.normal_hi.resize(coords);
  b.pct_lo.resize(coords);
  b.pct_hi.resize(coords);
  std::vector<double> vals(m);
  for (std::size_t c = 0; c < coords; ++c) {
    for (std::size_t r = 0; r < m; ++r) vals[r] = reps[r][c];
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(m);
    double s2 = 0.0;
    for (double v : vals) s2 += (v - mean) * (v - mean);
    s2 = m > 1 ? s2 / static_cast<double>(m - 1) : 0.0;
    const double half = 1.96 * std::sqrt(s2 / static_cast<double>(m));
    std::sort(vals.begin(), vals.end());
    b.center[c] = mean;
    b.normal_lo[c] = mean - half;
    b.normal_hi[c] = mean + half;
    b.pct_lo[c] = quantile_type7_sorted(vals, 0.025);
    b.pct_hi[c] = quantile_type7_sorted(vals, 0.975);
  }
  return b;
}

}  // namespace

CIBands ci_bands(const std::function<CountMatrix(int)>& generate, int n_per_rep, int macro_reps) {
  if (macro_reps < 2) throw std::invalid_argument("ci_bands: need >= 2 macro replications");
  if (n_per_rep < 2) throw std::invalid_argument("ci_bands: need >= 2 days per replication");
  std::vector<std::vector<double>> means, vars, corrs;
  means.reserve(static_cast<std::size_t>(macro_reps));
  for (int r = 0; r < macro_reps; ++r) {
    CountMatrix batch = generate(r);
    if (batch.num_days() != n_per_rep)
      throw std::runtime_error("ci_bands: generator returned the wrong number of days");
    const SummaryStats s = summarize(batch);
    means.push_back(s.marginal_mean);
    vars.push_back(s.marginal_variance);
    corrs.push_back(s.past_future_corr);
  }
  CIBands out;
  out.macro_reps = macro_reps;
  out.marginal_mean = band_from_reps(means);
  out.marginal_variance = band_from_reps(vars);
  out.past_future_corr = band_from_reps(corrs);
  return out;
}

void save_summary_csv(const std::string& path, const SummaryStats& stats) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "statistic,index,value\n";
  char buf[96];
  for (std::size_t j = 0; j < stats.marginal_mean.size(); ++j) {
    std::snprintf(buf, sizeof buf, "mean,%zu,%.17g\n", j + 1, stats.marginal_mean[j]);
    out << buf;
  }
  for (std::size_t j = 0; j < stats.marginal_variance.size(); ++j) {
    std::snprintf(buf, sizeof buf, "variance,%zu,%.17g\n", j + 1, stats.marginal_variance[j]);
    out << buf;
  }
  for (std::size_t j = 0; j < stats.past_future_corr.size(); ++j) {
    std::snprintf(buf, sizeof buf, "past_future_corr,%zu,%.17g\n", j + 1,
                  stats.past_future_corr[j]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dswgan
