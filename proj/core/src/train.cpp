#include "dswgan/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dswgan {

void TrainingConfig::validate() const {
  if (!(zeta >= 0.0)) throw std::invalid_argument("TrainingConfig: zeta must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainingConfig: batch_size must be >= 1");
  if (n_critic < 1) throw std::invalid_argument("TrainingConfig: n_critic must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("TrainingConfig: Adam betas must lie in [0, 1)");
  if (iterations < 0) throw std::invalid_argument("TrainingConfig: iterations must be >= 0");
  if (!(lr_start >= lr_end && lr_end > 0.0))
    throw std::invalid_argument("TrainingConfig: need lr_start >= lr_end > 0");
  if (!(lambda_min > 0.0)) throw std::invalid_argument("TrainingConfig: lambda_min must be > 0");
  if (!(surrogate_clip_hi > surrogate_clip_lo))
    throw std::invalid_argument("TrainingConfig: surrogate clip bounds out of order");
  if (gen_hidden.empty() || disc_hidden.empty())
    throw std::invalid_argument("TrainingConfig: need at least one hidden layer");
}

std::string training_config_canonical_json(const TrainingConfig& c) {
  nlohmann::json j;
  j["gen_hidden"] = c.gen_hidden;
  j["disc_hidden"] = c.disc_hidden;
  j["zeta"] = c.zeta;
  j["batch_size"] = c.batch_size;
  j["n_critic"] = c.n_critic;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["iterations"] = c.iterations;
  j["lr_start"] = c.lr_start;
  j["lr_end"] = c.lr_end;
  j["lambda_min"] = c.lambda_min;
  j["surrogate_clip_lo"] = c.surrogate_clip_lo;
  j["surrogate_clip_hi"] = c.surrogate_clip_hi;
  j["init_weight_std"] = c.init_weight_std;
  j["init_bias"] = c.init_bias;
  j["standardize_inputs"] = c.standardize_inputs;
  j["seed"] = c.seed;
  return j.dump();
}

TrainingConfig training_config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TrainingConfig c;
  if (j.contains("gen_hidden")) c.gen_hidden = j["gen_hidden"].get<std::vector<int>>();
  if (j.contains("disc_hidden")) c.disc_hidden = j["disc_hidden"].get<std::vector<int>>();
  c.zeta = j.value("zeta", c.zeta);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.n_critic = j.value("n_critic", c.n_critic);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.iterations = j.value("iterations", c.iterations);
  c.lr_start = j.value("lr_start", c.lr_start);
  c.lr_end = j.value("lr_end", c.lr_end);
  c.lambda_min = j.value("lambda_min", c.lambda_min);
  c.surrogate_clip_lo = j.value("surrogate_clip_lo", c.surrogate_clip_lo);
  c.surrogate_clip_hi = j.value("surrogate_clip_hi", c.surrogate_clip_hi);
  c.init_weight_std = j.value("init_weight_std", c.init_weight_std);
  c.init_bias = j.value("init_bias", c.init_bias);
  c.standardize_inputs = j.value("standardize_inputs", c.standardize_inputs);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

namespace {

// Standard Adam with bias correction. `direction` is +1 for ascent
// (critic) and -1 for descent (generator).
struct Adam {
  MLPGradients m;
  MLPGradients v;
  double beta1, beta2, eps;
  long step = 0;

  Adam(const MLPParams& params, double b1, double b2, double e)
      : m(make_gradients(params)), v(make_gradients(params)), beta1(b1), beta2(b2), eps(e) {}

  void update(MLPParams& params, const MLPGradients& g, double lr, double direction) {
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      m.weights[l] = beta1 * m.weights[l] + (1.0 - beta1) * g.weights[l];
      v.weights[l].array() =
          beta2 * v.weights[l].array() + (1.0 - beta2) * g.weights[l].array().square();
      params.weights[l].array() += direction * lr * (m.weights[l].array() / bc1) /
                                   ((v.weights[l].array() / bc2).sqrt() + eps);
      m.biases[l] = beta1 * m.biases[l] + (1.0 - beta1) * g.biases[l];
      v.biases[l].array() =
          beta2 * v.biases[l].array() + (1.0 - beta2) * g.biases[l].array().square();
      params.biases[l].array() += direction * lr * (m.biases[l].array() / bc1) /
                                  ((v.biases[l].array() / bc2).sqrt() + eps);
    }
  }
};

Eigen::MatrixXd uniform_matrix(RngStream& stream, int rows, int cols) {
  Eigen::MatrixXd u(rows, cols);
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) u(i, j) = stream.next_uniform();
  return u;
}

void check_finite(double x, int iteration, const char* what, const std::string& state) {
  if (!std::isfinite(x)) {
    std::ostringstream msg;
    msg << "training aborted at iteration " << iteration << ": non-finite " << what << "\n"
        << state;
    throw TrainingError(iteration, msg.str());
  }
}

}  // namespace

TrainResult train(const CountMatrix& data, const TrainingConfig& config) {
  config.validate();
  data.validate();
  const int n = data.num_days();
  const int p = data.num_intervals();
  const int m = config.batch_size;

  Eigen::MatrixXd real(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) real(i, j) = static_cast<double>(data.days[i][j]);

  TrainResult result;
  DSWGANModel& model = result.model;
  model.horizon = data.horizon;
  model.lambda_min = config.lambda_min;
  model.surrogate_clip_lo = config.surrogate_clip_lo;
  model.surrogate_clip_hi = config.surrogate_clip_hi;
  model.seed = config.seed;

  std::vector<int> gw = {p};
  gw.insert(gw.end(), config.gen_hidden.begin(), config.gen_hidden.end());
  gw.push_back(p);
  std::vector<int> dw = {p};
  dw.insert(dw.end(), config.disc_hidden.begin(), config.disc_hidden.end());
  dw.push_back(1);
  model.generator = make_mlp(gw);
  model.discriminator = make_mlp(dw);

  RngStream init_stream(config.seed, 0);
  init_mlp(model.generator, init_stream, config.init_weight_std, config.init_bias);
  init_mlp(model.discriminator, init_stream, config.init_weight_std, config.init_bias);

  model.standardize.enabled = config.standardize_inputs;
  if (config.standardize_inputs) {
    model.standardize.mean = real.colwise().mean();
    Eigen::VectorXd var(p);
    for (int j = 0; j < p; ++j) {
      const double mu = model.standardize.mean(j);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += (real(i, j) - mu) * (real(i, j) - mu);
      var(j) = n > 1 ? s / (n - 1) : 0.0;
    }
    model.standardize.stddev = var.array().sqrt().max(1e-8).matrix();
  }
  model.validate();

  const Eigen::VectorXd weights_in = model.standardize.input_weights();  // empty when disabled

  Adam adam_disc(model.discriminator, config.adam_beta1, config.adam_beta2, config.adam_eps);
  Adam adam_gen(model.generator, config.adam_beta1, config.adam_beta2, config.adam_eps);

  RngStream rng(config.seed, 1);
  const double lr_ratio = config.lr_end / config.lr_start;

  result.log.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 0; it < config.iterations; ++it) {
    const double lr =
        config.lr_start *
        std::pow(lr_ratio, static_cast<double>(it) / static_cast<double>(config.iterations));
    TrainingLogRow row;
    row.iteration = it;

    for (int critic_step = 0; critic_step < config.n_critic; ++critic_step) {
      // Real batch: uniform with replacement from the n rows.
      Eigen::MatrixXd x_real(m, p);
      for (int i = 0; i < m; ++i) {
        int idx = static_cast<int>(rng.next_uniform() * n);
        if (idx >= n) idx = n - 1;
        x_real.row(i) = real.row(idx);
      }

      const Eigen::MatrixXd noise = uniform_matrix(rng, m, p);
      const ForwardTrace gen_trace = forward(model.generator, noise);
      Eigen::MatrixXd x_fake(m, p);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < p; ++j) {
          const double rate = std::max(gen_trace.output()(i, j), config.lambda_min);
          x_fake(i, j) = static_cast<double>(sample_poisson(rng, rate));
        }

      // Interpolates for the gradient penalty.
      Eigen::MatrixXd x_hat(m, p);
      for (int i = 0; i < m; ++i) {
        const double eps = rng.next_uniform();
        x_hat.row(i) = eps * x_real.row(i) + (1.0 - eps) * x_fake.row(i);
      }

      // f on fake and real rows in one pass; upstream +1 on fakes, -1 on
      // reals gives the gradient of sum f(fake) - sum f(real).
      Eigen::MatrixXd both(2 * m, p);
      both.topRows(m) = x_fake;
      both.bottomRows(m) = x_real;
      const ForwardTrace disc_trace = forward(model.discriminator, model.standardize.apply(both));
      Eigen::MatrixXd upstream = Eigen::MatrixXd::Ones(2 * m, 1);
      upstream.bottomRows(m).setConstant(-1.0);
      MLPGradients disc_grad = backward_params(model.discriminator, disc_trace, upstream);

      const PenaltyResult pen = grad_penalty_params(
          model.discriminator, model.standardize.apply(x_hat), config.zeta, weights_in);
      // Ascend the Wasserstein term while keeping the Lipschitz penalty a
      // penalty: the update direction is grad(sum_fake - sum_real) -
      // grad(penalty).
      disc_grad.add_scaled(pen.param_grads, -1.0);

      const double sum_fake = disc_trace.output().topRows(m).sum();
      const double sum_real = disc_trace.output().bottomRows(m).sum();
      row.loss_critic = sum_fake - sum_real - pen.value;
      row.penalty = pen.value;
      row.critic_grad_norm = std::sqrt(disc_grad.squared_norm());
      check_finite(row.loss_critic, it, "critic loss",
                   "sum_fake=" + std::to_string(sum_fake) + " sum_real=" + std::to_string(sum_real) +
                       " penalty=" + std::to_string(pen.value));
      check_finite(row.critic_grad_norm, it, "critic gradient", "");

      adam_disc.update(model.discriminator, disc_grad, lr, +1.0);
    }

    // Generator step on a fresh batch.
    const Eigen::MatrixXd noise = uniform_matrix(rng, m, p);
    const ForwardTrace gen_trace = forward(model.generator, noise);
    Eigen::MatrixXd x_fake(m, p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) {
        const double rate = std::max(gen_trace.output()(i, j), config.lambda_min);
        x_fake(i, j) = static_cast<double>(sample_poisson(rng, rate));
      }
    const ForwardTrace disc_trace = forward(model.discriminator, model.standardize.apply(x_fake));
    Eigen::MatrixXd dgrad = grad_input(model.discriminator, disc_trace);
    if (weights_in.size() > 0) dgrad = dgrad.array().rowwise() * weights_in.transpose().array();

    SurrogateStats stats;
    MLPGradients gen_grad_total = generator_grad(model, noise, x_fake, dgrad, &stats);

    row.loss_gen = disc_trace.output().sum();
    row.clip_fraction = stats.fraction();
    row.gen_grad_norm = std::sqrt(gen_grad_total.squared_norm());
    check_finite(row.loss_gen, it, "generator loss", "");
    check_finite(row.gen_grad_norm, it, "generator gradient", "");

    adam_gen.update(model.generator, gen_grad_total, lr, -1.0);

    result.log.push_back(row);
  }

  return result;
}

void save_training_log(const std::string& path, const std::vector<TrainingLogRow>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iteration,loss_critic,loss_gen,penalty,clip_fraction,critic_grad_norm,gen_grad_norm\n";
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iteration,
                  r.loss_critic, r.loss_gen, r.penalty, r.clip_fraction, r.critic_grad_norm,
                  r.gen_grad_norm);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace dswgan
