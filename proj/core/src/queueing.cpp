#include "dswgan/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

#include "dswgan/mathx.hpp"

namespace dswgan {

void ServiceSpec::validate() const {
  if (!(mean_hours > 0.0) || !(variance > 0.0))
    throw std::invalid_argument("ServiceSpec: mean and variance must be > 0");
}

double ServiceSpec::draw(RngStream& stream) const {
  return sample_lognormal(stream, mean_hours, variance);
}

void StaffingPlan::validate() const {
  horizon.validate();
  if (static_cast<int>(servers.size()) != horizon.intervals)
    throw std::invalid_argument("StaffingPlan: need one level per interval");
  for (int s : servers)
    if (s < 1) throw std::invalid_argument("StaffingPlan: every level must be >= 1");
}

int StaffingPlan::capacity_at(double t) const {
  if (t >= horizon.t_end) return servers.back();
  return servers[static_cast<std::size_t>(horizon.interval_of(t))];
}

std::vector<double> interval_loads(const PiecewiseLinearTable& profile, const Horizon& horizon) {
  horizon.validate();
  profile.validate();
  const double dt = horizon.interval_length();
  std::vector<double> loads(static_cast<std::size_t>(horizon.intervals));
  for (int i = 0; i < horizon.intervals; ++i) {
    const double a = i * dt;
    const double b = (i + 1 == horizon.intervals) ? horizon.t_end : (i + 1) * dt;
    loads[static_cast<std::size_t>(i)] = profile.integral(a, b);
  }
  return loads;
}

namespace {

StaffingPlan staffing_from(const std::vector<double>& loads, const Horizon& horizon,
                           double (*formula)(double, double, double), double beta, double alpha,
                           double mean_service) {
  horizon.validate();
  if (static_cast<int>(loads.size()) != horizon.intervals)
    throw std::invalid_argument("staffing: need one load per interval");
  StaffingPlan plan;
  plan.horizon = horizon;
  plan.servers.resize(loads.size());
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (!(loads[i] > 0.0)) throw std::invalid_argument("staffing: loads must be > 0");
    const double offered = loads[i] * mean_service;
    const double s = std::ceil(formula(offered, beta, alpha));
    if (!(s >= 1.0))
      throw std::invalid_argument("staffing: formula gives fewer than one server in interval " +
                                  std::to_string(i + 1));
    plan.servers[i] = static_cast<int>(s);
  }
  return plan;
}

}  // namespace

StaffingPlan staffing_sqrt(const std::vector<double>& loads, double mean_service, double beta,
                           const Horizon& horizon) {
  if (!(mean_service > 0.0)) throw std::invalid_argument("staffing_sqrt: mean service must be > 0");
  return staffing_from(
      loads, horizon,
      [](double offered, double b, double) { return offered + b * std::sqrt(offered); }, beta, 0.0,
      mean_service);
}

StaffingPlan staffing_power(const std::vector<double>& loads, double mean_service, double beta,
                            double alpha, const Horizon& horizon) {
  if (!(mean_service > 0.0)) throw std::invalid_argument("staffing_power: mean service must be > 0");
  if (!(alpha >= 0.0 && alpha <= 0.5))
    throw std::invalid_argument("staffing_power: alpha must lie in [0, 1/2]");
  return staffing_from(
      loads, horizon,
      [](double offered, double b, double a) { return offered + b * std::pow(offered, 0.5 + a); },
      beta, alpha, mean_service);
}

std::vector<double> minute_checkpoints(const Horizon& horizon) {
  horizon.validate();
  const double minute = 1.0 / 60.0;
  const int n = static_cast<int>(std::floor(horizon.t_end / minute + 1e-9));
  std::vector<double> cp(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) cp[static_cast<std::size_t>(k - 1)] = k * minute;
  return cp;
}

std::vector<int> run_infinite_server(const EpochList& epochs, const ServiceSpec& service,
                                     const std::vector<double>& checkpoints, RngStream& stream) {
  service.validate();
  std::vector<int> delta(checkpoints.size() + 1, 0);
  for (double a : epochs.times) {
    const double depart = a + service.draw(stream);
    const auto lo = std::lower_bound(checkpoints.begin(), checkpoints.end(), a);
    const auto hi = std::lower_bound(checkpoints.begin(), checkpoints.end(), depart);
    ++delta[static_cast<std::size_t>(lo - checkpoints.begin())];
    --delta[static_cast<std::size_t>(hi - checkpoints.begin())];
  }
  std::vector<int> occupancy(checkpoints.size());
  int run = 0;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    run += delta[k];
    occupancy[k] = run;
  }
  return occupancy;
}

std::vector<CustomerOutcome> run_many_server(const EpochList& epochs, const ServiceSpec& service,
                                             const StaffingPlan& plan, RngStream& stream) {
  service.validate();
  plan.validate();
  const double dt = plan.horizon.interval_length();
  const int p = plan.horizon.intervals;

  std::vector<CustomerOutcome> out(epochs.size());
  std::priority_queue<double, std::vector<double>, std::greater<double>> departures;
  std::deque<std::size_t> waiting;  // indices of queued customers
  std::size_t next_arrival = 0;
  int boundary = 1;  // next staffing change at boundary*dt
  int busy = 0;
  int capacity = plan.servers.front();

  const double inf = std::numeric_limits<double>::infinity();
  auto admit = [&](double now) {
    while (!waiting.empty() && busy < capacity) {
      const std::size_t idx = waiting.front();
      waiting.pop_front();
      out[idx].arrival = epochs.times[idx];
      out[idx].wait = now - epochs.times[idx];
      out[idx].service = service.draw(stream);
      departures.push(now + out[idx].service);
      ++busy;
    }
  };

  for (;;) {
    const double t_arr = next_arrival < epochs.size() ? epochs.times[next_arrival] : inf;
    const double t_dep = departures.empty() ? inf : departures.top();
    const double t_bnd = boundary < p ? boundary * dt : inf;
    if (t_arr == inf && t_dep == inf) break;

    // Departures first, then arrivals, then the staffing change: an arrival
    // exactly on a boundary still belongs to the closing interval.
    if (t_dep <= t_arr && t_dep <= t_bnd) {
      departures.pop();
      --busy;
      admit(t_dep);
    } else if (t_arr <= t_bnd) {
      const std::size_t idx = next_arrival++;
      out[idx].arrival = epochs.times[idx];
      waiting.push_back(idx);
      admit(t_arr);
    } else {
      capacity = plan.servers[static_cast<std::size_t>(boundary)];
      ++boundary;
      admit(t_bnd);
    }
  }
  return out;
}

std::vector<double> mean_wait_by_interval(const std::vector<CustomerOutcome>& outcomes,
                                          const Horizon& horizon) {
  std::vector<double> sum(static_cast<std::size_t>(horizon.intervals), 0.0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(horizon.intervals), 0);
  for (const auto& c : outcomes) {
    const auto j = static_cast<std::size_t>(horizon.interval_of(c.arrival));
    sum[j] += c.wait;
    ++count[j];
  }
  std::vector<double> mean(sum.size());
  for (std::size_t j = 0; j < sum.size(); ++j)
    mean[j] = count[j] ? sum[j] / static_cast<double>(count[j])
                       : std::numeric_limits<double>::quiet_NaN();
  return mean;
}

QueueReport summarize_runs(const std::vector<std::vector<double>>& per_rep, int macro_reps) {
  if (macro_reps < 2) throw std::invalid_argument("summarize_runs: need >= 2 macro replications");
  if (per_rep.empty()) throw std::invalid_argument("summarize_runs: no replications");
  const std::size_t coords = per_rep.front().size();
  for (const auto& r : per_rep)
    if (r.size() != coords)
      throw std::invalid_argument("summarize_runs: replication length mismatch");
  const std::size_t group = per_rep.size() / static_cast<std::size_t>(macro_reps);
  if (group < 1) throw std::invalid_argument("summarize_runs: fewer replications than macro groups");

  QueueReport rep;
  rep.macro_reps = macro_reps;
  rep.mean.resize(coords);
  rep.variance.resize(coords);
  rep.quantile80.resize(coords);

  std::vector<double> vals;
  std::vector<double> g_mean(static_cast<std::size_t>(macro_reps));
  std::vector<double> g_var(static_cast<std::size_t>(macro_reps));
  std::vector<double> g_q80(static_cast<std::size_t>(macro_reps));
  for (std::size_t c = 0; c < coords; ++c) {
    for (int g = 0; g < macro_reps; ++g) {
      vals.clear();
      for (std::size_t r = static_cast<std::size_t>(g) * group;
           r < static_cast<std::size_t>(g + 1) * group; ++r) {
        const double v = per_rep[r][c];
        if (std::isfinite(v)) vals.push_back(v);
      }
      if (vals.empty()) {
        g_mean[static_cast<std::size_t>(g)] = g_var[static_cast<std::size_t>(g)] =
            g_q80[static_cast<std::size_t>(g)] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double m = 0.0;
      for (double v : vals) m += v;
      m /= static_cast<double>(vals.size());
      double s2 = 0.0;
      for (double v : vals) s2 += (v - m) * (v - m);
      s2 = vals.size() > 1 ? s2 / static_cast<double>(vals.size() - 1) : 0.0;
      std::sort(vals.begin(), vals.end());
      g_mean[static_cast<std::size_t>(g)] = m;
      g_var[static_cast<std::size_t>(g)] = s2;
      g_q80[static_cast<std::size_t>(g)] = quantile_type7_sorted(vals, 0.8);
    }
    auto ci = [&](const std::vector<double>& stat) {
      QueueReportEntry e;
      std::vector<double> ok;
      for (double v : stat)
        if (std::isfinite(v)) ok.push_back(v);
      if (ok.empty()) {
        e.value = e.ci_lo = e.ci_hi = std::numeric_limits<double>::quiet_NaN();
        return e;
      }
      double m = 0.0;
      for (double v : ok) m += v;
      m /= static_cast<double>(ok.size());
      double s2 = 0.0;
      for (double v : ok) s2 += (v - m) * (v - m);
      s2 = ok.size() > 1 ? s2 / static_cast<double>(ok.size() - 1) : 0.0;
      const double half = 1.96 * std::sqrt(s2 / static_cast<double>(ok.size()));
      e.value = m;
      e.ci_lo = m - half;
      e.ci_hi = m + half;
      return e;
    };
    rep.mean[c] = ci(g_mean);
    rep.variance[c] = ci(g_var);
    rep.quantile80[c] = ci(g_q80);
  }
  return rep;
}

void save_queue_report_csv(const std::string& path, const QueueReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "id,statistic,value,ci_lo,ci_hi\n";
  char buf[160];
  auto dump = [&](const char* name, const std::vector<QueueReportEntry>& entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%.17g\n", i + 1, name, entries[i].value,
                    entries[i].ci_lo, entries[i].ci_hi);
      out << buf;
    }
  };
  dump("mean", report.mean);
  dump("variance", report.variance);
  dump("quantile80", report.quantile80);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dswgan
