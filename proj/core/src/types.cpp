#include "dswgan/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dswgan {

void Horizon::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("Horizon: t_end must be a positive finite number");
  if (intervals < 1)
    throw std::invalid_argument("Horizon: intervals must be >= 1");
}

std::vector<double> Horizon::boundaries() const {
  std::vector<double> b(static_cast<std::size_t>(intervals));
  const double dt = interval_length();
  for (int j = 1; j <= intervals; ++j)
    b[static_cast<std::size_t>(j - 1)] = (j == intervals) ? t_end : j * dt;
  return b;
}

int Horizon::interval_of(double time) const {
  const double dt = interval_length();
  // First j with boundary_j >= time; matches the half-open ((j-1)dt, j*dt]
  // rule as long as callers generate times strictly inside their interval.
  int j = static_cast<int>(std::ceil(time / dt));
  if (j < 1) j = 1;
  if (j > intervals) j = intervals;
  // std::ceil can land one cell off when time sits a few ulps from a
  // boundary; fix up against the same boundary values used everywhere.
  if (j < intervals && time > j * dt) ++j;
  if (j > 1 && time <= (j - 1) * dt) --j;
  return j - 1;
}

void CountMatrix::validate() const {
  horizon.validate();
  if (days.empty()) throw std::invalid_argument("CountMatrix: needs at least one day");
  const std::size_t p = static_cast<std::size_t>(horizon.intervals);
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (days[i].size() != p)
      throw std::invalid_argument("CountMatrix: row " + std::to_string(i) +
                                  " has " + std::to_string(days[i].size()) +
                                  " columns, expected " + std::to_string(p));
    for (std::size_t j = 0; j < p; ++j)
      if (days[i][j] < 0)
        throw std::invalid_argument("CountMatrix: negative count at row " +
                                    std::to_string(i) + ", column " + std::to_string(j));
  }
}

CountVector EpochList::bin(const Horizon& horizon) const {
  CountVector counts(static_cast<std::size_t>(horizon.intervals), 0);
  for (double t : times) ++counts[static_cast<std::size_t>(horizon.interval_of(t))];
  return counts;
}

void EpochList::validate(const Horizon& horizon) const {
  horizon.validate();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= horizon.t_end))
      throw std::invalid_argument("EpochList: time out of [0, t_end]");
    if (i > 0 && times[i] < times[i - 1])
      throw std::invalid_argument("EpochList: times not sorted");
  }
}

void PiecewiseLinearTable::validate() const {
  if (knots.size() < 2 || knots.size() != values.size())
    throw std::invalid_argument("PiecewiseLinearTable: need >= 2 knots and matching values");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]))
      throw std::invalid_argument("PiecewiseLinearTable: knots must be strictly increasing");
}

double PiecewiseLinearTable::value(double t) const {
  if (t <= knots.front()) return values.front();
  if (t >= knots.back()) return values.back();
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - knots.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - knots[lo]) / (knots[hi] - knots[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

double PiecewiseLinearTable::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  double total = 0.0;
  double t0 = a;
  double v0 = value(a);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i] <= t0) continue;
    if (knots[i] >= b) break;
    total += 0.5 * (v0 + values[i]) * (knots[i] - t0);
    t0 = knots[i];
    v0 = values[i];
  }
  total += 0.5 * (v0 + value(b)) * (b - t0);
  return total;
}

double PiecewiseLinearTable::max_on(double a, double b) const {
  double m = std::max(value(a), value(b));
  for (std::size_t i = 0; i < knots.size(); ++i)
    if (knots[i] > a && knots[i] < b) m = std::max(m, values[i]);
  return m;
}

double PiecewiseLinearTable::min_value() const {
  double m = values.front();
  for (double v : values) m = std::min(m, v);
  return m;
}

PiecewiseLinearTable default_time_of_day_profile(double t_end) {
  return PiecewiseLinearTable{{0.0, 0.5 * t_end, t_end}, {50.0, 150.0, 60.0}};
}

}  // namespace dswgan
