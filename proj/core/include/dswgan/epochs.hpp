#pragma once

#include <vector>

#include "dswgan/rng.hpp"
#include "dswgan/types.hpp"

namespace dswgan {

// Continuous piecewise-linear intensity determined by its values at the
// interval boundaries, with optional per-interval scale factors from the
// nonnegativity repair (1 everywhere in the regular case).
struct PWLIntensity {
  Horizon horizon;
  std::vector<double> boundary_values;  // lambda_0 .. lambda_p, all >= 0
  std::vector<double> segment_scale;    // length p
  int clamped_knots = 0;                // knots projected to zero by the repair

  double start_value(int interval) const;  // scaled left endpoint of interval (0-based)
  double end_value(int interval) const;
  double integral_over(int interval) const;
};

struct EpochSimReport {
  int clamped_knots = 0;
  int uniform_fallback_intervals = 0;
};

// Uniform placement inside each interval: x_j iid uniforms on
// ((j-1)T/p, jT/p], merged in order.
EpochList epochs_piecewise_constant(const CountVector& counts, const Horizon& horizon,
                                    RngStream& stream);

// Count-matching continuous fit: boundary values solve
// (lambda_{j-1} + lambda_j)/2 * dt = x_j with the free endpoint chosen to
// minimize the summed squared slope jumps subject to nonnegativity. When no
// nonnegative continuous solution exists, negative knots are projected to
// zero and each affected interval is rescaled to keep its integral exact.
PWLIntensity fit_pwl_intensity(const CountVector& counts, const Horizon& horizon);

// Inversion sampling of x_j epochs per interval from the fitted intensity.
// Intervals with positive count but identically zero intensity fall back to
// uniform placement (reported).
EpochList epochs_from_pwl(const PWLIntensity& pwl, const CountVector& counts, RngStream& stream,
                          EpochSimReport* report = nullptr);

EpochList epochs_piecewise_linear(const CountVector& counts, const Horizon& horizon,
                                  RngStream& stream, EpochSimReport* report = nullptr);

}  // namespace dswgan
