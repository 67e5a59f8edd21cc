#include "dswgan/epochs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dswgan {

namespace {

void validate_counts(const CountVector& counts, const Horizon& horizon) {
  horizon.validate();
  if (static_cast<int>(counts.size()) != horizon.intervals)
    throw std::invalid_argument("counts length must equal the number of intervals");
  for (auto c : counts)
    if (c < 0) throw std::invalid_argument("counts must be nonnegative");
}

// Keep epochs strictly inside (lo, hi] so binning by the shared boundary
// values reproduces the input counts exactly.
double clamp_into(double t, double lo, double hi) {
  if (!(t > lo)) return std::nextafter(lo, hi);
  if (t > hi) return hi;
  return t;
}

}  // namespace

double PWLIntensity::start_value(int interval) const {
  return boundary_values[static_cast<std::size_t>(interval)] *
         segment_scale[static_cast<std::size_t>(interval)];
}

double PWLIntensity::end_value(int interval) const {
  return boundary_values[static_cast<std::size_t>(interval) + 1] *
         segment_scale[static_cast<std::size_t>(interval)];
}

double PWLIntensity::integral_over(int interval) const {
  return 0.5 * (start_value(interval) + end_value(interval)) * horizon.interval_length();
}

EpochList epochs_piecewise_constant(const CountVector& counts, const Horizon& horizon,
                                    RngStream& stream) {
  validate_counts(counts, horizon);
  const double dt = horizon.interval_length();
  EpochList out;
  out.times.reserve(static_cast<std::size_t>(
      std::accumulate(counts.begin(), counts.end(), std::int64_t{0})));
  std::vector<double> cell;
  for (int j = 0; j < horizon.intervals; ++j) {
    const double lo = j * dt;
    const double hi = (j + 1 == horizon.intervals) ? horizon.t_end : (j + 1) * dt;
    cell.clear();
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(j)]; ++i) {
      const double u = stream.next_uniform();
      cell.push_back(clamp_into(hi - u * (hi - lo), lo, hi));
    }
    std::sort(cell.begin(), cell.end());
    out.times.insert(out.times.end(), cell.begin(), cell.end());
  }
  return out;
}

PWLIntensity fit_pwl_intensity(const CountVector& counts, const Horizon& horizon) {
  validate_counts(counts, horizon);
  const int p = horizon.intervals;
  const double dt = horizon.interval_length();

  // Sweep representation: lambda_j = d_j + sign_j * a with a = lambda_0.
  std::vector<double> d(static_cast<std::size_t>(p) + 1, 0.0);
  for (int j = 1; j <= p; ++j)
    d[static_cast<std::size_t>(j)] =
        2.0 * static_cast<double>(counts[static_cast<std::size_t>(j - 1)]) / dt -
        d[static_cast<std::size_t>(j - 1)];
  auto sign = [](int j) { return (j % 2 == 0) ? 1.0 : -1.0; };

  // Minimize sum_j (lambda_j - lambda_{j-1})^2, a quadratic in a.
  double cross = 0.0;
  for (int j = 1; j <= p; ++j)
    cross += sign(j) * (d[static_cast<std::size_t>(j)] - d[static_cast<std::size_t>(j - 1)]);
  const double a_star = -cross / (2.0 * p);

  // Nonnegativity of every lambda_j translates into bounds on a.
  double lo = 0.0;
  double hi = d[1];
  for (int j = 2; j <= p; ++j) {
    if (sign(j) > 0)
      lo = std::max(lo, -d[static_cast<std::size_t>(j)]);
    else
      hi = std::min(hi, d[static_cast<std::size_t>(j)]);
  }

  PWLIntensity out;
  out.horizon = horizon;
  out.boundary_values.resize(static_cast<std::size_t>(p) + 1);
  out.segment_scale.assign(static_cast<std::size_t>(p), 1.0);

  const double feas_tol = 1e-9 * (1.0 + std::fabs(hi) + std::fabs(lo));
  if (lo <= hi + feas_tol) {
    const double a = std::min(std::max(a_star, lo), std::max(lo, hi));
    for (int j = 0; j <= p; ++j)
      out.boundary_values[static_cast<std::size_t>(j)] =
          std::max(d[static_cast<std::size_t>(j)] + sign(j) * a, 0.0);
    return out;
  }

  // No nonnegative continuous solution: clamp negative knots to zero and
  // rescale each touched interval so its integral still matches the count.
  const double a = std::min(std::max(a_star, 0.0), std::max(d[1], 0.0));
  for (int j = 0; j <= p; ++j) {
    const double v = d[static_cast<std::size_t>(j)] + sign(j) * a;
    if (v < 0.0) ++out.clamped_knots;
    out.boundary_values[static_cast<std::size_t>(j)] = std::max(v, 0.0);
  }
  for (int j = 1; j <= p; ++j) {
    const double integ = 0.5 *
                         (out.boundary_values[static_cast<std::size_t>(j - 1)] +
                          out.boundary_values[static_cast<std::size_t>(j)]) *
                         dt;
    const double target = static_cast<double>(counts[static_cast<std::size_t>(j - 1)]);
    if (integ > 0.0 && target >= 0.0)
      out.segment_scale[static_cast<std::size_t>(j - 1)] = target / integ;
  }
  return out;
}

EpochList epochs_from_pwl(const PWLIntensity& pwl, const CountVector& counts, RngStream& stream,
                          EpochSimReport* report) {
  validate_counts(counts, pwl.horizon);
  if (static_cast<int>(pwl.boundary_values.size()) != pwl.horizon.intervals + 1)
    throw std::invalid_argument("epochs_from_pwl: intensity/horizon mismatch");
  const int p = pwl.horizon.intervals;
  const double dt = pwl.horizon.interval_length();
  if (report) report->clamped_knots += pwl.clamped_knots;

  EpochList out;
  std::vector<double> cell;
  for (int j = 0; j < p; ++j) {
    const std::int64_t n = counts[static_cast<std::size_t>(j)];
    if (n == 0) continue;
    const double t0 = j * dt;
    const double t1 = (j + 1 == p) ? pwl.horizon.t_end : (j + 1) * dt;
    const double v0 = pwl.start_value(j);
    const double v1 = pwl.end_value(j);
    const double slope = (v1 - v0) / dt;
    const double intercept = v0 - slope * t0;  // lambda(t) = slope*t + intercept
    const double area = 0.5 * (v0 + v1) * dt;  // cumulative intensity over the interval

    cell.clear();
    if (area <= 0.0) {
      // Positive count on a dead interval; place uniformly instead.
      if (report) ++report->uniform_fallback_intervals;
      for (std::int64_t i = 0; i < n; ++i)
        cell.push_back(clamp_into(t1 - stream.next_uniform() * (t1 - t0), t0, t1));
    } else {
      const double c0 = 0.5 * slope * t0 * t0 + intercept * t0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double u = area * stream.next_uniform();
        double s;
        if (std::fabs(slope) < 1e-12) {
          s = (u + intercept * t0 + 0.5 * slope * t0 * t0) / intercept;
        } else {
          const double disc = std::max(intercept * intercept + 2.0 * slope * (c0 + u), 0.0);
          s = (-intercept + std::sqrt(disc)) / slope;
        }
        cell.push_back(clamp_into(s, t0, t1));
      }
    }
    std::sort(cell.begin(), cell.end());
    out.times.insert(out.times.end(), cell.begin(), cell.end());
  }
  return out;
}

EpochList epochs_piecewise_linear(const CountVector& counts, const Horizon& horizon,
                                  RngStream& stream, EpochSimReport* report) {
  const PWLIntensity pwl = fit_pwl_intensity(counts, horizon);
  return epochs_from_pwl(pwl, counts, stream, report);
}

}  // namespace dswgan
