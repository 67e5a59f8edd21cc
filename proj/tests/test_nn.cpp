#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dswgan/mlp.hpp"
#include "testutil.hpp"

using namespace dswgan;

namespace {

// Small random nets for gradient checks: weights scaled by fan-in, small
// random biases so masks are diverse but pre-activations stay O(1).
MLPParams random_net(const std::vector<int>& widths, RngStream& stream) {
  MLPParams p = make_mlp(widths);
  for (int l = 0; l < p.num_layers(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.weights[l].cols()));
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c)
        p.weights[l](r, c) = scale * sample_normal(stream);
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i)
      p.biases[l](i) = 0.1 * sample_normal(stream);
  }
  return p;
}

Eigen::VectorXd random_vec(int n, RngStream& stream) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = sample_normal(stream);
  return v;
}

std::vector<Eigen::MatrixXd> masks_of(const ForwardTrace& t, int layers) {
  std::vector<Eigen::MatrixXd> m;
  for (int l = 0; l + 1 < layers; ++l) m.push_back((t.pre[l].array() > 0.0).cast<double>());
  return m;
}

bool same_masks(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

double rel_err(double got, double want) {
  const double denom = std::max({std::fabs(got), std::fabs(want), 1e-8});
  return std::fabs(got - want) / denom;
}

// Central finite difference over every weight/bias coordinate of `value`,
// skipping coordinates whose +/-h perturbation flips a ReLU mask. Returns
// the worst relative error over checked coordinates.
double fd_param_check(MLPParams params, const Eigen::VectorXd& x,
                      const std::function<double(const MLPParams&)>& value,
                      const MLPGradients& analytic, double h, int* checked,
                      bool check_biases = true) {
  const auto base_masks = masks_of(forward(params, x.transpose()), params.num_layers());
  double worst = 0.0;
  *checked = 0;
  auto probe = [&](double& coord, double grad) {
    const double keep = coord;
    coord = keep + h;
    const ForwardTrace tp = forward(params, x.transpose());
    const double fp = value(params);
    const bool stable_p = same_masks(masks_of(tp, params.num_layers()), base_masks);
    coord = keep - h;
    const ForwardTrace tm = forward(params, x.transpose());
    const double fm = value(params);
    const bool stable_m = same_masks(masks_of(tm, params.num_layers()), base_masks);
    coord = keep;
    if (!stable_p || !stable_m) return;  // kink too close; skip
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, rel_err(grad, fd));
    ++(*checked);
  };
  for (int l = 0; l < params.num_layers(); ++l) {
    for (Eigen::Index r = 0; r < params.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < params.weights[l].cols(); ++c)
        probe(params.weights[l](r, c), analytic.weights[l](r, c));
    if (check_biases)
      for (Eigen::Index i = 0; i < params.biases[l].size(); ++i)
        probe(params.biases[l](i), analytic.biases[l](i));
  }
  return worst;
}

}  // namespace

TEST_CASE("forward: zero net and bias passthrough") {
  MLPParams p = make_mlp({3, 4, 2});
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(forward_value(p, x).isZero());

  p.biases[1] << 7.0, -3.0;
  const Eigen::VectorXd out = forward_value(p, x);
  CHECK(out(0) == doctest::Approx(7.0));
  CHECK(out(1) == doctest::Approx(-3.0));
}

TEST_CASE("forward: hand-computed two-layer case") {
  MLPParams p = make_mlp({2, 2, 1});
  p.weights[0] << 1.0, 2.0, -1.0, 0.5;
  p.biases[0] << 0.5, -0.25;
  p.weights[1] << 0.3, -2.0;
  p.biases[1] << 0.1;
  Eigen::VectorXd x(2);
  x << 2.0, 0.5;
  // z1 = (3.5, -2) -> a1 = (3.5, 0) -> out = 0.3*3.5 + 0.1.
  CHECK(forward_value(p, x)(0) == doctest::Approx(1.15));
  x << 1.0, -1.0;
  // z1 = (-0.5, -1.75), everything dead, only the output bias remains.
  CHECK(forward_value(p, x)(0) == doctest::Approx(0.1));
}

TEST_CASE("forward: shape mismatch is an error") {
  MLPParams p = make_mlp({3, 4, 2});
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK_THROWS_AS(forward_value(p, x), std::invalid_argument);
}

TEST_CASE("backward_params: linear net gradient is the input") {
  MLPParams p = make_mlp({3, 2});
  RngStream s(5, 0);
  init_mlp(p, s, 0.3, 0.1);
  Eigen::VectorXd x(3);
  x << 1.5, -2.0, 3.0;
  const ForwardTrace t = forward(p, x.transpose());
  Eigen::MatrixXd upstream(1, 2);
  upstream << 1.0, 0.0;
  const MLPGradients g = backward_params(p, t, upstream);
  for (int j = 0; j < 3; ++j) {
    CHECK(g.weights[0](0, j) == doctest::Approx(x(j)));
    CHECK(g.weights[0](1, j) == doctest::Approx(0.0));
  }
  CHECK(g.biases[0](0) == doctest::Approx(1.0));
  CHECK(g.biases[0](1) == doctest::Approx(0.0));
}

TEST_CASE("backward_params: zero upstream gives zero gradients") {
  RngStream s(6, 0);
  MLPParams p = random_net({4, 8, 8, 3}, s);
  const Eigen::VectorXd x = random_vec(4, s);
  const ForwardTrace t = forward(p, x.transpose());
  const MLPGradients g = backward_params(p, t, Eigen::MatrixXd::Zero(1, 3));
  CHECK(g.squared_norm() == doctest::Approx(0.0));
}

TEST_CASE("backward_params: finite-difference oracle on random 3-layer nets") {
  RngStream s(7, 0);
  const double h = 1e-5;
  for (int rep = 0; rep < 5; ++rep) {
    MLPParams p = random_net({5, 12, 9, 3}, s);
    const Eigen::VectorXd x = random_vec(5, s);
    const Eigen::VectorXd u = random_vec(3, s);
    const ForwardTrace t = forward(p, x.transpose());
    const MLPGradients analytic = backward_params(p, t, u.transpose());
    auto value = [&](const MLPParams& q) {
      return (forward_value(q, x).transpose() * u).value();
    };
    int checked = 0;
    const double worst = fd_param_check(p, x, value, analytic, h, &checked);
    CHECK(checked > 100);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("grad_input: single linear layer returns the weights") {
  MLPParams p = make_mlp({4, 1});
  p.weights[0] << 0.5, -1.0, 2.0, 0.25;
  p.biases[0] << 3.0;
  Eigen::VectorXd x(4);
  x << 1.0, 1.0, -2.0, 0.0;
  const ForwardTrace t = forward(p, x.transpose());
  const Eigen::MatrixXd g = grad_input(p, t);
  CHECK(g.rows() == 1);
  for (int j = 0; j < 4; ++j) CHECK(g(0, j) == doctest::Approx(p.weights[0](0, j)));
}

TEST_CASE("grad_input: dead network has zero input gradient") {
  MLPParams p = make_mlp({2, 3, 1});
  p.weights[0].setConstant(0.1);
  p.biases[0].setConstant(-100.0);  // deeply negative pre-activations
  p.weights[1].setConstant(1.0);
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  const ForwardTrace t = forward(p, x.transpose());
  CHECK(grad_input(p, t).isZero());
}

TEST_CASE("grad_input: tie at zero counts as inactive") {
  MLPParams p = make_mlp({1, 1, 1});
  p.weights[0] << 1.0;
  p.biases[0] << -1.0;
  p.weights[1] << 5.0;
  Eigen::VectorXd x(1);
  x << 1.0;  // pre-activation exactly zero
  const ForwardTrace t = forward(p, x.transpose());
  CHECK(t.pre[0](0, 0) == 0.0);
  CHECK(grad_input(p, t)(0, 0) == 0.0);
}

TEST_CASE("grad_input: rejects vector-output nets") {
  MLPParams p = make_mlp({3, 4, 2});
  const ForwardTrace t = forward(p, Eigen::MatrixXd::Zero(1, 3));
  CHECK_THROWS_AS(grad_input(p, t), std::invalid_argument);
}

TEST_CASE("grad_input: finite-difference oracle at mask-stable points") {
  RngStream s(8, 0);
  const double h = 1e-5;
  for (int rep = 0; rep < 5; ++rep) {
    const MLPParams p = random_net({6, 10, 8, 1}, s);
    const Eigen::VectorXd x = random_vec(6, s);
    const ForwardTrace t = forward(p, x.transpose());
    const auto base = masks_of(t, p.num_layers());
    const Eigen::MatrixXd g = grad_input(p, t);
    for (int j = 0; j < 6; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const ForwardTrace tp = forward(p, xp.transpose());
      const ForwardTrace tm = forward(p, xm.transpose());
      if (!same_masks(masks_of(tp, p.num_layers()), base) ||
          !same_masks(masks_of(tm, p.num_layers()), base))
        continue;
      const double fd = (tp.output()(0, 0) - tm.output()(0, 0)) / (2.0 * h);
      CHECK(rel_err(g(0, j), fd) < 1e-4);
    }
  }
}

TEST_CASE("directional derivative matches the input gradient") {
  RngStream s(9, 0);
  const double h = 1e-5;
  int verified = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const MLPParams p = random_net({5, 9, 7, 1}, s);
    const Eigen::VectorXd x = random_vec(5, s);
    Eigen::VectorXd v = random_vec(5, s);
    v.normalize();
    const ForwardTrace t = forward(p, x.transpose());
    const auto base = masks_of(t, p.num_layers());
    const ForwardTrace tp = forward(p, (x + h * v).transpose());
    const ForwardTrace tm = forward(p, (x - h * v).transpose());
    if (!same_masks(masks_of(tp, p.num_layers()), base) ||
        !same_masks(masks_of(tm, p.num_layers()), base))
      continue;
    const double fd = (tp.output()(0, 0) - tm.output()(0, 0)) / (2.0 * h);
    const double dir = (grad_input(p, t) * v)(0, 0);
    CHECK(rel_err(dir, fd) < 1e-4);
    ++verified;
  }
  CHECK(verified > 10);
}

TEST_CASE("positive homogeneity with zero biases") {
  RngStream s(10, 0);
  for (int rep = 0; rep < 10; ++rep) {
    MLPParams p = random_net({4, 8, 6, 2}, s);
    for (auto& b : p.biases) b.setZero();
    const Eigen::VectorXd x = random_vec(4, s);
    for (double c : {0.5, 2.0, 7.25}) {
      const Eigen::VectorXd lhs = forward_value(p, (c * x).eval());
      const Eigen::VectorXd rhs = c * forward_value(p, x);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("gradient penalty: exactly 1-Lipschitz linear net") {
  MLPParams p = make_mlp({4, 1});
  p.weights[0] << 0.5, 0.5, 0.5, 0.5;  // norm 1
  const PenaltyResult r = grad_penalty_params(p, Eigen::MatrixXd::Random(1, 4), 0.5);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.param_grads.squared_norm() == doctest::Approx(0.0));
  CHECK(r.degenerate_count == 0);
}

TEST_CASE("gradient penalty: closed form for a norm-2 linear net") {
  MLPParams p = make_mlp({4, 1});
  p.weights[0] << 1.0, 1.0, 1.0, 1.0;  // norm 2
  const PenaltyResult r = grad_penalty_params(p, Eigen::MatrixXd::Random(1, 4), 0.5);
  CHECK(r.value == doctest::Approx(0.5));  // 0.5 * (2-1)^2
  for (int j = 0; j < 4; ++j)
    CHECK(r.param_grads.weights[0](0, j) == doctest::Approx(p.weights[0](0, j) / 2.0));
}

TEST_CASE("gradient penalty: value is never negative") {
  RngStream s(11, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const MLPParams p = random_net({3, 6, 5, 1}, s);
    const Eigen::MatrixXd x = random_vec(3, s).transpose();
    CHECK(grad_penalty_params(p, x, 0.5).value >= 0.0);
  }
}

TEST_CASE("gradient penalty: degenerate zero-gradient point is flagged") {
  MLPParams p = make_mlp({2, 3, 1});
  p.weights[0].setConstant(0.1);
  p.biases[0].setConstant(-50.0);  // all units dead -> zero input gradient
  p.weights[1].setConstant(1.0);
  const PenaltyResult r = grad_penalty_params(p, Eigen::MatrixXd::Zero(1, 2), 0.75);
  CHECK(r.degenerate_count == 1);
  CHECK(r.value == doctest::Approx(0.75));  // zeta * (0 - 1)^2
  CHECK(r.param_grads.squared_norm() == doctest::Approx(0.0));
}

TEST_CASE("gradient penalty: finite-difference oracle on random 3-layer nets") {
  RngStream s(12, 0);
  const double h = 1e-5;
  const double zeta = 0.5;
  for (int rep = 0; rep < 5; ++rep) {
    MLPParams p = random_net({4, 10, 8, 1}, s);
    const Eigen::VectorXd x = random_vec(4, s);
    const PenaltyResult r = grad_penalty_params(p, x.transpose(), zeta);
    auto value = [&](const MLPParams& q) {
      return grad_penalty_params(q, x.transpose(), zeta).value;
    };
    int checked = 0;
    const double worst = fd_param_check(p, x, value, r.param_grads, h, &checked);
    CHECK(checked > 80);
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("gradient penalty: weighted input coordinates") {
  // f(x) = w.x with weighting s: grad wrt x of f((x-m)/s) is w/s.
  MLPParams p = make_mlp({2, 1});
  p.weights[0] << 3.0, 4.0;
  Eigen::VectorXd inv_s(2);
  inv_s << 1.0 / 2.0, 1.0 / 4.0;  // norm of (1.5, 1) = sqrt(3.25)
  const PenaltyResult r = grad_penalty_params(p, Eigen::MatrixXd::Zero(1, 2), 1.0, inv_s);
  const double norm = std::sqrt(1.5 * 1.5 + 1.0);
  CHECK(r.value == doctest::Approx((norm - 1.0) * (norm - 1.0)));
  // dP/dw_j = 2 (r-1)/r * (w_j / s_j^2).
  for (int j = 0; j < 2; ++j)
    CHECK(r.param_grads.weights[0](0, j) ==
          doctest::Approx(2.0 * (norm - 1.0) / norm * p.weights[0](0, j) * inv_s(j) * inv_s(j)));
}

TEST_CASE("batch evaluation agrees with per-sample evaluation") {
  RngStream s(13, 0);
  const MLPParams p = random_net({5, 8, 8, 3}, s);
  Eigen::MatrixXd x(6, 5);
  for (int i = 0; i < 6; ++i) x.row(i) = random_vec(5, s).transpose();
  Eigen::MatrixXd u(6, 3);
  for (int i = 0; i < 6; ++i) u.row(i) = random_vec(3, s).transpose();

  const ForwardTrace batch = forward(p, x);
  MLPGradients batch_g = backward_params(p, batch, u);

  MLPGradients sum = make_gradients(p);
  for (int i = 0; i < 6; ++i) {
    const ForwardTrace t = forward(p, x.row(i));
    CHECK((t.output().row(0) - batch.output().row(i)).cwiseAbs().maxCoeff() < 1e-12);
    sum.add_scaled(backward_params(p, t, u.row(i)), 1.0);
  }
  for (int l = 0; l < p.num_layers(); ++l) {
    CHECK((sum.weights[l] - batch_g.weights[l]).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((sum.biases[l] - batch_g.biases[l]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mlp json round trip preserves parameters exactly") {
  RngStream s(14, 0);
  const MLPParams p = random_net({3, 7, 5, 2}, s);
  const MLPParams q = mlp_from_json(mlp_to_json(p));
  CHECK(q.widths == p.widths);
  for (int l = 0; l < p.num_layers(); ++l) {
    CHECK(q.weights[l] == p.weights[l]);
    CHECK(q.biases[l] == p.biases[l]);
  }
}
