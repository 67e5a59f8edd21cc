#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dswgan/rng.hpp"
#include "dswgan/types.hpp"

namespace dswgan {

// Mean-reverting square-root diffusion intensity
//   d lambda = kappa (R(t) - lambda) dt + sigma R(t)^alpha sqrt(lambda) dB,
// started at R(0) * Gamma(beta, beta), discretized by Euler-Maruyama.
struct CIRConfig {
  double kappa = 0.2;
  double sigma = 0.4;
  double alpha = 0.3;
  double beta = 100.0;
  PiecewiseLinearTable time_of_day;  // R(t) on [0, t_end]
  double euler_step = 0.001;         // hours; effective step is t_end/round(t_end/euler_step)
  Horizon horizon{11.0, 22};

  void validate() const;
};

// Precomputed per-cell drift/volatility coefficients; build once when
// simulating many days off one config.
struct CIRGrid {
  int steps = 0;
  double delta = 0.0;
  std::vector<double> r;    // R at grid points, size steps+1
  std::vector<double> vol;  // sigma * R^alpha * sqrt(delta) at grid points
};

CIRGrid make_cir_grid(const CIRConfig& config);

// Intensity path at the grid points (size steps+1). Negative excursions are
// truncated at zero inside the square root; path values are stored as
// produced by the scheme.
std::vector<double> simulate_cir_path(const CIRConfig& config, RngStream& stream);
std::vector<double> simulate_cir_path(const CIRConfig& config, const CIRGrid& grid,
                                      RngStream& stream);

struct CIRDay {
  CountVector counts;
  EpochList epochs;
};

// One day of arrivals by thinning against a per-cell majorant of the
// (linearly interpolated, zero-floored) realized path.
CIRDay simulate_cir_day(const CIRConfig& config, RngStream& stream);
CIRDay simulate_cir_day(const CIRConfig& config, const CIRGrid& grid, RngStream& stream);

// n iid days; day i consumes base.substream(i). Epochs are appended to
// *epochs_out when given.
CountMatrix simulate_cir_days(const CIRConfig& config, int n_days, const RngStream& base,
                              std::vector<EpochList>* epochs_out = nullptr);

// Mixed-Poisson counts with Gamma(alpha_j, alpha_j) busyness factors coupled
// by a normal copula: X_j ~ Poisson(lambda_j * B_j), B_j = G_j^{-1}(Phi(Z_j)),
// Z ~ N(0, copula_corr).
struct PGnortaConfig {
  std::vector<double> base_rates;  // lambda_j > 0
  std::vector<double> dispersion;  // alpha_j > 0
  Eigen::MatrixXd copula_corr;     // symmetric PSD, unit diagonal

  int p() const { return static_cast<int>(base_rates.size()); }
  void validate() const;
};

// Lower-triangular factor of the copula matrix; adds 1e-8 jitter to the
// diagonal up to 10 times before giving up with std::runtime_error.
Eigen::MatrixXd pgnorta_cholesky(const PGnortaConfig& config);

CountVector simulate_pgnorta_day(const PGnortaConfig& config, RngStream& stream,
                                 Eigen::VectorXd* z_out = nullptr,
                                 Eigen::VectorXd* b_out = nullptr);
CountVector simulate_pgnorta_day(const PGnortaConfig& config, const Eigen::MatrixXd& chol,
                                 RngStream& stream, Eigen::VectorXd* z_out = nullptr,
                                 Eigen::VectorXd* b_out = nullptr);

// n iid days; day i consumes base.substream(i).
CountMatrix simulate_pgnorta_days(const PGnortaConfig& config, const Horizon& horizon, int n_days,
                                  const RngStream& base);

}  // namespace dswgan
