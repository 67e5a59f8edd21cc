#pragma once

#include <cstdint>
#include <vector>

namespace dswgan {

// Operating day [0, t_end] partitioned into `intervals` equal pieces.
// Interval j (1-based) covers ((j-1)*dt, j*dt] with dt = t_end/intervals.
struct Horizon {
  double t_end = 0.0;  // hours
  int intervals = 0;   // p

  double interval_length() const { return t_end / intervals; }
  // Right boundaries dt, 2*dt, ..., t_end. All binning goes through these
  // values so epoch simulators and binners agree bit-for-bit.
  std::vector<double> boundaries() const;
  // Half-open interval index for a time in (0, t_end]; clamped at the edges.
  int interval_of(double time) const;
  void validate() const;
};

using CountVector = std::vector<std::int64_t>;
using IntensityVector = std::vector<double>;

struct CountMatrix {
  std::vector<CountVector> days;
  Horizon horizon;

  int num_days() const { return static_cast<int>(days.size()); }
  int num_intervals() const { return horizon.intervals; }
  void validate() const;
};

// Sorted arrival times within [0, t_end] for one day.
struct EpochList {
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  CountVector bin(const Horizon& horizon) const;
  void validate(const Horizon& horizon) const;
};

// Piecewise-linear function given by knots; used for time-of-day rate
// profiles. Evaluation clamps outside the knot range.
struct PiecewiseLinearTable {
  std::vector<double> knots;
  std::vector<double> values;

  double value(double t) const;
  double integral(double a, double b) const;  // exact trapezoid
  double max_on(double a, double b) const;
  double min_value() const;
  void validate() const;
};

// Hump-shaped profile for smoke tests and examples: 50 at open,
// 150 at midday, 60 at close.
PiecewiseLinearTable default_time_of_day_profile(double t_end);

}  // namespace dswgan
