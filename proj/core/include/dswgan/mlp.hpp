#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dswgan/rng.hpp"

namespace dswgan {

// Fully connected ReLU network
//   out = W_L * relu(W_{L-1} * ... relu(W_1 * x + b_1) ... + b_{L-1}) + b_L.
// Weights are stored per layer as (n_l x n_{l-1}) matrices. All batch ops
// use the row convention: one sample per row.
struct MLPParams {
  std::vector<int> widths;               // n_0 .. n_L
  std::vector<Eigen::MatrixXd> weights;  // W_1 .. W_L
  std::vector<Eigen::VectorXd> biases;   // b_1 .. b_L

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  std::size_t num_parameters() const;
  void validate() const;
};

// Zero-initialized network with the given widths (n_0 .. n_L, L >= 1).
MLPParams make_mlp(const std::vector<int>& widths);

// Gaussian weights (mean 0, the given standard deviation) and constant
// biases on every layer.
void init_mlp(MLPParams& params, RngStream& stream, double weight_std, double bias_value);

// Cached intermediates of one forward pass over a batch (rows = samples).
// Masks follow the sign of the pre-activations with ties at zero inactive.
struct ForwardTrace {
  Eigen::MatrixXd input;              // m x n_0
  std::vector<Eigen::MatrixXd> pre;   // z_l, m x n_l, l = 1..L
  std::vector<Eigen::MatrixXd> post;  // relu(z_l) for l < L; z_L last
  const Eigen::MatrixXd& output() const { return post.back(); }
};

ForwardTrace forward(const MLPParams& params, const Eigen::MatrixXd& x);
// Single-sample convenience.
Eigen::VectorXd forward_value(const MLPParams& params, const Eigen::VectorXd& x);

// Per-layer parameter gradients. Supports the few arithmetic ops the
// optimizers need.
struct MLPGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void add_scaled(const MLPGradients& other, double factor);
  void set_zero();
  double squared_norm() const;
};

MLPGradients make_gradients(const MLPParams& params);

// Gradient of sum_i <upstream_i, output_i> with respect to every weight and
// bias, with the ReLU masks frozen at their trace values.
MLPGradients backward_params(const MLPParams& params, const ForwardTrace& trace,
                             const Eigen::MatrixXd& upstream);

// Input gradients for scalar-output nets, one row per sample.
Eigen::MatrixXd grad_input(const MLPParams& params, const ForwardTrace& trace);

struct PenaltyResult {
  double value = 0.0;            // sum over the batch of zeta*(|grad| - 1)^2
  Eigen::VectorXd per_sample;    // penalty value per row
  MLPGradients param_grads;      // d value / d params, masks frozen
  int degenerate_count = 0;      // rows whose input gradient vanished
};

// Gradient penalty zeta * (||grad_x f(x)||_2 - 1)^2 and its exact parameter
// gradient under fixed ReLU masks. `input_weights`, when non-empty, rescales
// the input gradient coordinatewise before taking the norm (used when the
// net consumes affinely standardized inputs but the penalty lives in the
// original coordinates). Rows with vanishing gradient norm contribute value
// zeta and zero gradient, and are counted in degenerate_count.
PenaltyResult grad_penalty_params(const MLPParams& params, const Eigen::MatrixXd& x,
                                  double zeta,
                                  const Eigen::VectorXd& input_weights = Eigen::VectorXd());

// JSON (de)serialization of the raw parameters; row-major weight arrays.
std::string mlp_to_json(const MLPParams& params);
MLPParams mlp_from_json(const std::string& text);

}  // namespace dswgan
