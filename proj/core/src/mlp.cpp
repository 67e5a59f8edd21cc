#include "dswgan/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace dswgan {

namespace {

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& pre) {
  // Tie at exactly zero counts as inactive.
  return (pre.array() > 0.0).cast<double>();
}

}  // namespace

std::size_t MLPParams::num_parameters() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l)
    n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
  return n;
}

void MLPParams::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("MLPParams: need at least one layer");
  if (weights.size() + 1 != widths.size() || biases.size() != weights.size())
    throw std::invalid_argument("MLPParams: inconsistent layer count");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (widths[l] < 1 || widths[l + 1] < 1)
      throw std::invalid_argument("MLPParams: widths must be positive");
    if (weights[l].rows() != widths[l + 1] || weights[l].cols() != widths[l])
      throw std::invalid_argument("MLPParams: weight shape mismatch at layer " + std::to_string(l + 1));
    if (biases[l].size() != widths[l + 1])
      throw std::invalid_argument("MLPParams: bias shape mismatch at layer " + std::to_string(l + 1));
  }
}

MLPParams make_mlp(const std::vector<int>& widths) {
  MLPParams p;
  p.widths = widths;
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    p.weights.emplace_back(Eigen::MatrixXd::Zero(widths[l + 1], widths[l]));
    p.biases.emplace_back(Eigen::VectorXd::Zero(widths[l + 1]));
  }
  p.validate();
  return p;
}

void init_mlp(MLPParams& params, RngStream& stream, double weight_std, double bias_value) {
  for (int l = 0; l < params.num_layers(); ++l) {
    auto& w = params.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = weight_std * sample_normal(stream);
    params.biases[l].setConstant(bias_value);
  }
}

ForwardTrace forward(const MLPParams& params, const Eigen::MatrixXd& x) {
  if (x.cols() != params.input_dim())
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " columns, expected " + std::to_string(params.input_dim()));
  const int L = params.num_layers();
  ForwardTrace t;
  t.input = x;
  t.pre.reserve(L);
  t.post.reserve(L);
  const Eigen::MatrixXd* a = &t.input;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (*a) * params.weights[l].transpose();
    z.rowwise() += params.biases[l].transpose();
    t.pre.push_back(std::move(z));
    if (l + 1 < L)
      t.post.push_back(t.pre.back().cwiseMax(0.0));
    else
      t.post.push_back(t.pre.back());
    a = &t.post.back();
  }
  return t;
}

Eigen::VectorXd forward_value(const MLPParams& params, const Eigen::VectorXd& x) {
  const ForwardTrace t = forward(params, x.transpose());
  return t.output().row(0).transpose();
}

MLPGradients make_gradients(const MLPParams& params) {
  MLPGradients g;
  for (int l = 0; l < params.num_layers(); ++l) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols()));
    g.biases.emplace_back(Eigen::VectorXd::Zero(params.biases[l].size()));
  }
  return g;
}

void MLPGradients::add_scaled(const MLPGradients& other, double factor) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += factor * other.weights[l];
    biases[l] += factor * other.biases[l];
  }
}

void MLPGradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

double MLPGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return s;
}

MLPGradients backward_params(const MLPParams& params, const ForwardTrace& trace,
                             const Eigen::MatrixXd& upstream) {
  const int L = params.num_layers();
  if (upstream.rows() != trace.input.rows() || upstream.cols() != params.output_dim())
    throw std::invalid_argument("backward_params: upstream shape mismatch");
  MLPGradients g = make_gradients(params);
  Eigen::MatrixXd e = upstream;
  for (int l = L; l >= 1; --l) {
    const Eigen::MatrixXd& a_prev = (l == 1) ? trace.input : trace.post[l - 2];
    g.weights[l - 1] = e.transpose() * a_prev;
    g.biases[l - 1] = e.colwise().sum().transpose();
    if (l > 1) e = (e * params.weights[l - 1]).cwiseProduct(relu_mask(trace.pre[l - 2]));
  }
  return g;
}

Eigen::MatrixXd grad_input(const MLPParams& params, const ForwardTrace& trace) {
  const int L = params.num_layers();
  if (params.output_dim() != 1)
    throw std::invalid_argument("grad_input: requires a scalar-output net");
  Eigen::MatrixXd e = Eigen::MatrixXd::Ones(trace.input.rows(), 1);
  for (int l = L; l >= 2; --l)
    e = (e * params.weights[l - 1]).cwiseProduct(relu_mask(trace.pre[l - 2]));
  return e * params.weights[0];
}

PenaltyResult grad_penalty_params(const MLPParams& params, const Eigen::MatrixXd& x,
                                  double zeta, const Eigen::VectorXd& input_weights) {
  if (params.output_dim() != 1)
    throw std::invalid_argument("grad_penalty_params: requires a scalar-output net");
  const int L = params.num_layers();
  const Eigen::Index m = x.rows();
  const bool weighted = input_weights.size() > 0;
  if (weighted && input_weights.size() != params.input_dim())
    throw std::invalid_argument("grad_penalty_params: input_weights dimension mismatch");

  const ForwardTrace trace = forward(params, x);

  // Backward vectors e_l, reused for both the input gradient and the
  // penalty's parameter gradient.
  std::vector<Eigen::MatrixXd> e(static_cast<std::size_t>(L));
  e[L - 1] = Eigen::MatrixXd::Ones(m, 1);
  for (int l = L - 1; l >= 1; --l)
    e[l - 1] = (e[l] * params.weights[l]).cwiseProduct(relu_mask(trace.pre[l - 1]));

  Eigen::MatrixXd gin = e[0] * params.weights[0];  // m x n_0
  if (weighted) gin = gin.array().rowwise() * input_weights.transpose().array();

  PenaltyResult res;
  res.per_sample.resize(m);
  Eigen::VectorXd coef(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = gin.row(i).norm();
    res.per_sample(i) = zeta * (r - 1.0) * (r - 1.0);
    if (r < 1e-12) {
      coef(i) = 0.0;
      ++res.degenerate_count;
    } else {
      coef(i) = 2.0 * zeta * (r - 1.0) / r;
    }
  }
  res.value = res.per_sample.sum();

  // Forward pass of the linearized net seeded with the penalty direction.
  // With masks frozen the penalty does not depend on the biases, so only
  // weight gradients are produced: dP/dW_l = e_l^T c_{l-1}.
  Eigen::MatrixXd c = gin.array().colwise() * coef.array();
  if (weighted) c = c.array().rowwise() * input_weights.transpose().array();

  res.param_grads = make_gradients(params);
  for (int l = 1; l <= L; ++l) {
    res.param_grads.weights[l - 1] = e[l - 1].transpose() * c;
    if (l < L) c = (c * params.weights[l - 1].transpose()).cwiseProduct(relu_mask(trace.pre[l - 1]));
  }
  return res;
}

std::string mlp_to_json(const MLPParams& params) {
  nlohmann::json j;
  j["layer_widths"] = params.widths;
  nlohmann::json ws = nlohmann::json::array();
  nlohmann::json bs = nlohmann::json::array();
  for (int l = 0; l < params.num_layers(); ++l) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(params.weights[l].size()));
    for (Eigen::Index r = 0; r < params.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < params.weights[l].cols(); ++c) flat.push_back(params.weights[l](r, c));
    ws.push_back(flat);
    bs.push_back(std::vector<double>(params.biases[l].data(),
                                     params.biases[l].data() + params.biases[l].size()));
  }
  j["weights"] = std::move(ws);
  j["biases"] = std::move(bs);
  return j.dump();
}

MLPParams mlp_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  MLPParams p = make_mlp(j.at("layer_widths").get<std::vector<int>>());
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  if (ws.size() != static_cast<std::size_t>(p.num_layers()) || bs.size() != ws.size())
    throw std::runtime_error("mlp_from_json: layer count mismatch");
  for (int l = 0; l < p.num_layers(); ++l) {
    const auto flat = ws[static_cast<std::size_t>(l)].get<std::vector<double>>();
    if (flat.size() != static_cast<std::size_t>(p.weights[l].size()))
      throw std::runtime_error("mlp_from_json: weight size mismatch at layer " + std::to_string(l + 1));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) p.weights[l](r, c) = flat[k++];
    const auto bias = bs[static_cast<std::size_t>(l)].get<std::vector<double>>();
    if (bias.size() != static_cast<std::size_t>(p.biases[l].size()))
      throw std::runtime_error("mlp_from_json: bias size mismatch at layer " + std::to_string(l + 1));
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) p.biases[l](i) = bias[static_cast<std::size_t>(i)];
  }
  p.validate();
  return p;
}

}  // namespace dswgan
