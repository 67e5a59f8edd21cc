#include "dswgan/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dswgan/mathx.hpp"

namespace dswgan {

void CIRConfig::validate() const {
  horizon.validate();
  if (!(kappa > 0.0 && sigma >= 0.0 && alpha > 0.0 && beta > 0.0))
    throw std::invalid_argument("CIRConfig: kappa, alpha, beta must be > 0 and sigma >= 0");
  time_of_day.validate();
  if (!(time_of_day.min_value() >= 0.0))
    throw std::invalid_argument("CIRConfig: R(t) must be nonnegative");
  if (!(euler_step > 0.0) || euler_step > horizon.interval_length())
    throw std::invalid_argument("CIRConfig: euler_step must be in (0, interval_length]");
}

CIRGrid make_cir_grid(const CIRConfig& config) {
  config.validate();
  CIRGrid g;
  g.steps = std::max<int>(1, static_cast<int>(std::llround(config.horizon.t_end / config.euler_step)));
  g.delta = config.horizon.t_end / g.steps;
  const double sqrt_delta = std::sqrt(g.delta);
  g.r.resize(static_cast<std::size_t>(g.steps) + 1);
  g.vol.resize(static_cast<std::size_t>(g.steps) + 1);
  for (int k = 0; k <= g.steps; ++k) {
    const double t = (k == g.steps) ? config.horizon.t_end : k * g.delta;
    g.r[static_cast<std::size_t>(k)] = config.time_of_day.value(t);
    g.vol[static_cast<std::size_t>(k)] =
        config.sigma * std::pow(g.r[static_cast<std::size_t>(k)], config.alpha) * sqrt_delta;
  }
  return g;
}

std::vector<double> simulate_cir_path(const CIRConfig& config, RngStream& stream) {
  return simulate_cir_path(config, make_cir_grid(config), stream);
}

std::vector<double> simulate_cir_path(const CIRConfig& config, const CIRGrid& grid,
                                      RngStream& stream) {
  std::vector<double> path(static_cast<std::size_t>(grid.steps) + 1);
  path[0] = grid.r[0] * sample_gamma(stream, config.beta, config.beta);
  for (int k = 0; k < grid.steps; ++k) {
    const double lam = path[static_cast<std::size_t>(k)];
    const double z = sample_normal(stream);
    path[static_cast<std::size_t>(k) + 1] =
        lam + config.kappa * (grid.r[static_cast<std::size_t>(k)] - lam) * grid.delta +
        grid.vol[static_cast<std::size_t>(k)] * std::sqrt(std::max(lam, 0.0)) * z;
  }
  return path;
}

CIRDay simulate_cir_day(const CIRConfig& config, RngStream& stream) {
  return simulate_cir_day(config, make_cir_grid(config), stream);
}

CIRDay simulate_cir_day(const CIRConfig& config, const CIRGrid& grid, RngStream& stream) {
  const std::vector<double> path = simulate_cir_path(config, grid, stream);
  CIRDay day;
  // Thinning cell by cell: candidates from a homogeneous process at the
  // cell majorant, each kept with probability lambda(t)/majorant.
  for (int k = 0; k < grid.steps; ++k) {
    const double lo = std::max(path[static_cast<std::size_t>(k)], 0.0);
    const double hi = std::max(path[static_cast<std::size_t>(k) + 1], 0.0);
    const double majorant = std::max(lo, hi);
    if (majorant <= 0.0) continue;
    const std::int64_t candidates = sample_poisson(stream, majorant * grid.delta);
    const double t0 = k * grid.delta;
    for (std::int64_t c = 0; c < candidates; ++c) {
      const double u = stream.next_uniform();
      const double t = t0 + u * grid.delta;
      const double lam_t = lo + (hi - lo) * u;
      if (stream.next_uniform() * majorant <= lam_t) day.epochs.times.push_back(t);
    }
  }
  std::sort(day.epochs.times.begin(), day.epochs.times.end());
  day.counts = day.epochs.bin(config.horizon);
  return day;
}

CountMatrix simulate_cir_days(const CIRConfig& config, int n_days, const RngStream& base,
                              std::vector<EpochList>* epochs_out) {
  if (n_days < 1) throw std::invalid_argument("simulate_cir_days: n_days must be >= 1");
  const CIRGrid grid = make_cir_grid(config);
  CountMatrix m;
  m.horizon = config.horizon;
  m.days.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    RngStream day_stream = base.substream(static_cast<std::uint64_t>(d));
    CIRDay day = simulate_cir_day(config, grid, day_stream);
    m.days.push_back(std::move(day.counts));
    if (epochs_out) epochs_out->push_back(std::move(day.epochs));
  }
  return m;
}

void PGnortaConfig::validate() const {
  const int n = p();
  if (n < 1) throw std::invalid_argument("PGnortaConfig: need at least one interval");
  if (static_cast<int>(dispersion.size()) != n)
    throw std::invalid_argument("PGnortaConfig: dispersion length must match base_rates");
  for (double l : base_rates)
    if (!(l > 0.0)) throw std::invalid_argument("PGnortaConfig: base rates must be > 0");
  for (double a : dispersion)
    if (!(a > 0.0)) throw std::invalid_argument("PGnortaConfig: dispersion must be > 0");
  if (copula_corr.rows() != n || copula_corr.cols() != n)
    throw std::invalid_argument("PGnortaConfig: copula matrix must be p x p");
  for (int i = 0; i < n; ++i) {
    if (std::fabs(copula_corr(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("PGnortaConfig: copula matrix needs a unit diagonal");
    for (int j = 0; j < n; ++j)
      if (std::fabs(copula_corr(i, j) - copula_corr(j, i)) > 1e-12)
        throw std::invalid_argument("PGnortaConfig: copula matrix must be symmetric");
  }
}

Eigen::MatrixXd pgnorta_cholesky(const PGnortaConfig& config) {
  config.validate();
  Eigen::MatrixXd m = config.copula_corr;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    m.diagonal().array() += 1e-8;
  }
  throw std::runtime_error("pgnorta_cholesky: copula matrix is not positive semidefinite");
}

CountVector simulate_pgnorta_day(const PGnortaConfig& config, RngStream& stream,
                                 Eigen::VectorXd* z_out, Eigen::VectorXd* b_out) {
  return simulate_pgnorta_day(config, pgnorta_cholesky(config), stream, z_out, b_out);
}

CountVector simulate_pgnorta_day(const PGnortaConfig& config, const Eigen::MatrixXd& chol,
                                 RngStream& stream, Eigen::VectorXd* z_out,
                                 Eigen::VectorXd* b_out) {
  const int n = config.p();
  Eigen::VectorXd iid(n);
  for (int j = 0; j < n; ++j) iid(j) = sample_normal(stream);
  const Eigen::VectorXd z = chol * iid;

  Eigen::VectorXd b(n);
  CountVector counts(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double a = config.dispersion[static_cast<std::size_t>(j)];
    double u = normal_cdf(z(j));
    u = std::min(std::max(u, 1e-300), 1.0 - 1e-16);
    // Gamma(a, a) quantile: unit-rate quantile scaled by the rate.
    b(j) = gamma_p_inv(a, u) / a;
    counts[static_cast<std::size_t>(j)] =
        sample_poisson(stream, config.base_rates[static_cast<std::size_t>(j)] * b(j));
  }
  if (z_out) *z_out = z;
  if (b_out) *b_out = b;
  return counts;
}

CountMatrix simulate_pgnorta_days(const PGnortaConfig& config, const Horizon& horizon, int n_days,
                                  const RngStream& base) {
  if (n_days < 1) throw std::invalid_argument("simulate_pgnorta_days: n_days must be >= 1");
  horizon.validate();
  if (horizon.intervals != config.p())
    throw std::invalid_argument("simulate_pgnorta_days: horizon intervals must match config");
  const Eigen::MatrixXd chol = pgnorta_cholesky(config);
  CountMatrix m;
  m.horizon = horizon;
  m.days.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    RngStream day_stream = base.substream(static_cast<std::uint64_t>(d));
    m.days.push_back(simulate_pgnorta_day(config, chol, day_stream));
  }
  return m;
}

}  // namespace dswgan
