#pragma once

#include <string>
#include <vector>

#include "dswgan/rng.hpp"
#include "dswgan/types.hpp"

namespace dswgan {

// Lognormal service times stated by their natural mean and variance (hours).
struct ServiceSpec {
  double mean_hours = 0.1;
  double variance = 0.1;

  void validate() const;
  double draw(RngStream& stream) const;
};

// Servers per interval, piecewise constant on the horizon grid; the last
// interval's level persists past t_end while the system drains.
struct StaffingPlan {
  Horizon horizon;
  std::vector<int> servers;

  int capacity_at(double t) const;
  void validate() const;
};

// Per-interval offered-load integrals of a time-of-day rate profile,
// R_i = integral of R(t) over interval i (exact trapezoid).
std::vector<double> interval_loads(const PiecewiseLinearTable& profile, const Horizon& horizon);

// s_i = ceil(R_i*E(S) + beta*sqrt(R_i*E(S))). Throws when any s_i < 1.
StaffingPlan staffing_sqrt(const std::vector<double>& loads, double mean_service, double beta,
                           const Horizon& horizon);

// s_i = ceil(R_i*E(S) + beta*(R_i*E(S))^(1/2+alpha)), alpha in [0, 1/2].
StaffingPlan staffing_power(const std::vector<double>& loads, double mean_service, double beta,
                            double alpha, const Horizon& horizon);

// End of each minute over [0, t_end].
std::vector<double> minute_checkpoints(const Horizon& horizon);

// Infinite-server occupancy V(t) at the checkpoints: each arrival holds one
// server for an independent service draw.
std::vector<int> run_infinite_server(const EpochList& epochs, const ServiceSpec& service,
                                     const std::vector<double>& checkpoints, RngStream& stream);

struct CustomerOutcome {
  double arrival = 0.0;
  double wait = 0.0;
  double service = 0.0;
};

// FCFS single queue with time-varying capacity. Admissions respect the
// current capacity; customers already in service finish even when the
// capacity steps down.
std::vector<CustomerOutcome> run_many_server(const EpochList& epochs, const ServiceSpec& service,
                                             const StaffingPlan& plan, RngStream& stream);

// Mean wait of the customers arriving in each interval; NaN where none arrive.
std::vector<double> mean_wait_by_interval(const std::vector<CustomerOutcome>& outcomes,
                                          const Horizon& horizon);

struct QueueReportEntry {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Per-coordinate mean / variance / 80% quantile with 95% CIs across macro
// replications: the inner statistics are computed within each macro group,
// the CI is mean +/- 1.96 sd/sqrt(macro_reps) across groups.
struct QueueReport {
  int macro_reps = 0;
  std::vector<QueueReportEntry> mean;
  std::vector<QueueReportEntry> variance;
  std::vector<QueueReportEntry> quantile80;
};

// `per_rep` holds one row per replication (coordinate values; NaN = missing).
// Replications are split in order into macro_reps equal groups.
QueueReport summarize_runs(const std::vector<std::vector<double>>& per_rep, int macro_reps);

void save_queue_report_csv(const std::string& path, const QueueReport& report);

}  // namespace dswgan
