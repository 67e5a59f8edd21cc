#pragma once

#include <cstdint>
#include <string>

#include "dswgan/mlp.hpp"
#include "dswgan/types.hpp"

namespace dswgan {

// Optional affine standardization of count vectors before the
// discriminator: z = (x - mean) / std, fitted on the training data.
struct Standardization {
  bool enabled = true;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd input_weights() const;  // 1/std (ones when disabled)
};

// Generator + discriminator pair. The generator maps p iid Uniform(0,1)
// coordinates to a vector of Poisson rates; counts are drawn coordinatewise
// from independent Poissons at those rates.
struct DSWGANModel {
  MLPParams generator;      // n_0 = n_L = p
  MLPParams discriminator;  // n_0 = p, n_L = 1
  Horizon horizon;
  Standardization standardize;
  double lambda_min = 1e-3;
  double surrogate_clip_lo = 0.0;
  double surrogate_clip_hi = 5.0;

  // Provenance carried into the model file.
  std::uint64_t seed = 0;
  std::string config_hash;

  int p() const { return horizon.intervals; }
  void validate() const;
};

// One generator pass: clamp(g(Y), lambda_min) with Y ~ Uniform(0,1)^p.
IntensityVector simulate_intensity(const DSWGANModel& model, RngStream& stream);

// One day of counts: coordinate i ~ Poisson(intensity_i).
CountVector simulate_counts(const DSWGANModel& model, RngStream& stream);

// Replacement derivative of the Poisson step, 1 + (count - rate)/(2*rate),
// clipped to [lo, hi]. The rate must already be clamped to >= lambda_min.
double surrogate_poisson_grad(double rate, std::int64_t count, double lambda_min = 1e-3,
                              double lo = 0.0, double hi = 5.0);

struct SurrogateStats {
  std::int64_t clipped = 0;
  std::int64_t total = 0;
  double fraction() const { return total ? static_cast<double>(clipped) / static_cast<double>(total) : 0.0; }
};

// Chain-rule generator gradient for a batch: discriminator input gradients
// (w.r.t. raw counts) times the surrogate diagonal times the generator
// Jacobian. `noise`, `counts` and `disc_input_grad` are m x p, one sample
// per row, all from the same sample path.
MLPGradients generator_grad(const DSWGANModel& model, const Eigen::MatrixXd& noise,
                            const Eigen::MatrixXd& counts,
                            const Eigen::MatrixXd& disc_input_grad,
                            SurrogateStats* stats = nullptr);

// n_days iid rows with intensities multiplied by `scale` before the clamp
// and the Poisson draw. Day i consumes stream.substream(i); the op owns the
// id range [stream_id, stream_id + n_days).
CountMatrix sample(const DSWGANModel& model, int n_days, double scale, const RngStream& stream);

void save_model(const std::string& path, const DSWGANModel& model);
DSWGANModel load_model(const std::string& path);

}  // namespace dswgan
