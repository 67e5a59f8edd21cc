#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dswgan/model.hpp"

namespace dswgan {

struct TrainingConfig {
  std::vector<int> gen_hidden = {512, 512, 512};   // hidden widths; output p appended
  std::vector<int> disc_hidden = {512, 512, 512};  // hidden widths; output 1 appended
  double zeta = 0.5;                               // gradient penalty coefficient
  int batch_size = 256;
  int n_critic = 10;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.9;
  double adam_eps = 1e-8;
  int iterations = 50000;
  double lr_start = 1e-4;
  double lr_end = 1e-6;
  double lambda_min = 1e-3;
  double surrogate_clip_lo = 0.0;
  double surrogate_clip_hi = 5.0;
  double init_weight_std = std::sqrt(0.1);
  double init_bias = 3.0;
  bool standardize_inputs = true;
  std::uint64_t seed = 0;

  void validate() const;
};

// Canonical serialization used for the provenance hash in the model file.
std::string training_config_canonical_json(const TrainingConfig& config);
TrainingConfig training_config_from_json(const std::string& text);

struct TrainingLogRow {
  int iteration = 0;
  double loss_critic = 0.0;   // ascended critic objective, last critic step
  double loss_gen = 0.0;      // sum of critic scores on generated batch
  double penalty = 0.0;       // gradient penalty sum, last critic step
  double clip_fraction = 0.0; // surrogate entries clipped in the generator step
  double critic_grad_norm = 0.0;
  double gen_grad_norm = 0.0;
};

struct TrainResult {
  DSWGANModel model;
  std::vector<TrainingLogRow> log;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(int iteration, const std::string& what)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Adversarial estimation: n_critic critic updates per generator update,
// WGAN objective with gradient penalty, batch losses as sums, Adam on both
// networks with a continuous exponential lr decay from lr_start to lr_end.
// Throws TrainingError with a state dump if any loss or gradient goes
// non-finite.
TrainResult train(const CountMatrix& data, const TrainingConfig& config);

void save_training_log(const std::string& path, const std::vector<TrainingLogRow>& log);

}  // namespace dswgan
