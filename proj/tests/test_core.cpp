#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "dswgan/csv.hpp"
#include "dswgan/mathx.hpp"
#include "dswgan/rng.hpp"
#include "dswgan/types.hpp"
#include "testutil.hpp"

using namespace dswgan;

namespace {

std::vector<double> draw_many(std::function<double(RngStream&)> f, RngStream& s, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = f(s);
  return v;
}

}  // namespace

TEST_CASE("uniform vector: determinism contract") {
  RngStream a(42, 7), b(42, 7);
  const auto u1 = sample_uniform_vector(a, 22);
  const auto u2 = sample_uniform_vector(b, 22);
  CHECK(u1 == u2);
  const auto u3 = sample_uniform_vector(a, 22);
  CHECK(u1 != u3);
}

TEST_CASE("uniform vector: per-coordinate mean near 1/2") {
  RngStream s(1, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_uniform_vector(s, 1)[0];
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("uniform vector: open support and preconditions") {
  RngStream s(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto u = sample_uniform_vector(s, 1);
    CHECK(u[0] > 0.0);
    CHECK(u[0] < 1.0);
  }
  CHECK_THROWS_AS(sample_uniform_vector(s, 0), std::domain_error);
}

TEST_CASE("poisson: degenerate, moments, large rate") {
  RngStream s(11, 0);
  CHECK(sample_poisson(s, 0.0) == 0);

  const int n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = static_cast<double>(sample_poisson(s, 20.0));
  CHECK(std::fabs(testutil::mean(draws) - 20.0) < 0.05 * 3);
  CHECK(std::fabs(testutil::variance(draws) - 20.0) < 0.3 * 3);

  const auto big = sample_poisson(s, 1000.0);
  CHECK(big > 0);
  CHECK(big < 10000);
  CHECK_THROWS_AS(sample_poisson(s, -1.0), std::domain_error);
}

TEST_CASE("poisson: moment checks across rates and dispersion") {
  const int n = 100000;
  for (double rate : {1.0, 20.0, 100.0}) {
    RngStream s(12, static_cast<std::uint64_t>(rate));
    std::vector<double> draws(n);
    for (auto& d : draws) d = static_cast<double>(sample_poisson(s, rate));
    const double se_mean = std::sqrt(rate / n);
    const double mu4 = rate * (1.0 + 3.0 * rate);
    const double se_var = std::sqrt((mu4 - rate * rate) / n);
    CHECK(std::fabs(testutil::mean(draws) - rate) < 3 * se_mean);
    CHECK(std::fabs(testutil::variance(draws) - rate) < 3 * se_var);
    const double dispersion = testutil::variance(draws) / testutil::mean(draws);
    CHECK(dispersion > 0.95);
    CHECK(dispersion < 1.05);
  }
}

TEST_CASE("gamma: moments, exponential special case, mean identity") {
  const int n = 100000;
  {
    RngStream s(21, 0);
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_gamma(s, 100.0, 100.0);
    CHECK(std::fabs(testutil::mean(draws) - 1.0) < 0.001 * 3);
    CHECK(std::fabs(testutil::variance(draws) - 0.01) < 3e-4);
  }
  {
    RngStream s(22, 0);
    std::vector<double> draws(20000);
    for (auto& d : draws) d = sample_gamma(s, 1.0, 1.0);
    const double p = testutil::ks_pvalue(draws, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(p > 0.01);
  }
  {
    RngStream s(23, 0);
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_gamma(s, 2.0, 4.0);
    CHECK(std::fabs(testutil::mean(draws) - 0.5) < 0.005);
  }
  RngStream s(24, 0);
  CHECK_THROWS_AS(sample_gamma(s, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(sample_gamma(s, 1.0, -2.0), std::domain_error);
}

TEST_CASE("gamma: moment checks across shapes including shape < 1") {
  const int n = 100000;
  int setting = 0;
  for (auto [shape, rate] : {std::pair{0.5, 1.0}, std::pair{3.0, 2.0}, std::pair{100.0, 100.0}}) {
    RngStream s(25, static_cast<std::uint64_t>(setting++));
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_gamma(s, shape, rate);
    const double m = shape / rate;
    const double v = shape / (rate * rate);
    const double mu4 = v * v * (3.0 + 6.0 / shape);
    CHECK(std::fabs(testutil::mean(draws) - m) < 3 * std::sqrt(v / n));
    CHECK(std::fabs(testutil::variance(draws) - v) < 3 * std::sqrt((mu4 - v * v) / n));
  }
}

TEST_CASE("lognormal: requested natural moments") {
  const int n = 100000;
  {
    RngStream s(31, 0);
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_lognormal(s, 0.2, 0.1);
    CHECK(std::fabs(testutil::mean(draws) - 0.2) < 3.0 * std::sqrt(0.1) / std::sqrt(n));
  }
  {
    RngStream s(32, 0);
    bool all_near_one = true;
    for (int i = 0; i < 1000; ++i) {
      const double d = sample_lognormal(s, 1.0, 1e-12);
      if (std::fabs(d - 1.0) > 1e-4) all_near_one = false;
    }
    CHECK(all_near_one);
  }
  {
    RngStream s(33, 0);
    for (int i = 0; i < 1000; ++i) CHECK(sample_lognormal(s, 0.1, 0.1) > 0.0);
  }
  RngStream s(34, 0);
  CHECK_THROWS_AS(sample_lognormal(s, -0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(sample_lognormal(s, 0.1, 0.0), std::domain_error);
}

TEST_CASE("lognormal: variance check across parameter settings") {
  const int n = 100000;
  int setting = 0;
  for (auto [m, v] : {std::pair{0.2, 0.1}, std::pair{0.1, 0.1}, std::pair{1.0, 0.5}}) {
    RngStream s(35, static_cast<std::uint64_t>(setting++));
    std::vector<double> draws(n);
    for (auto& d : draws) d = sample_lognormal(s, m, v);
    // Central fourth moment from lognormal raw moments.
    const double s2 = std::log1p(v / (m * m));
    const double mu = std::log(m) - 0.5 * s2;
    auto raw = [&](int k) { return std::exp(k * mu + 0.5 * k * k * s2); };
    const double m1 = raw(1);
    const double mu4 = raw(4) - 4 * raw(3) * m1 + 6 * raw(2) * m1 * m1 - 3 * m1 * m1 * m1 * m1;
    CHECK(std::fabs(testutil::mean(draws) - m) < 3 * std::sqrt(v / n));
    CHECK(std::fabs(testutil::variance(draws) - v) < 3 * std::sqrt((mu4 - v * v) / n));
  }
}

TEST_CASE("streams with distinct ids are uncorrelated") {
  RngStream a(99, 1), b(99, 2);
  const int n = 10000;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = a.next_uniform();
    y[i] = b.next_uniform();
  }
  CHECK(std::fabs(testutil::correlation(x, y)) < 0.02);
}

TEST_CASE("horizon binning matches the half-open convention") {
  const Horizon h{11.0, 22};
  CHECK(h.interval_of(0.25) == 0);
  CHECK(h.interval_of(0.5) == 0);
  CHECK(h.interval_of(0.5000001) == 1);
  CHECK(h.interval_of(11.0) == 21);
  CHECK_THROWS_AS((Horizon{0.0, 4}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Horizon{1.0, 0}).validate(), std::invalid_argument);
}

TEST_CASE("piecewise linear table: value, integral, max") {
  const PiecewiseLinearTable t{{0.0, 1.0, 3.0}, {2.0, 4.0, 0.0}};
  t.validate();
  CHECK(t.value(0.5) == doctest::Approx(3.0));
  CHECK(t.value(2.0) == doctest::Approx(2.0));
  CHECK(t.value(-1.0) == doctest::Approx(2.0));  // clamped
  CHECK(t.integral(0.0, 3.0) == doctest::Approx(3.0 + 4.0));
  CHECK(t.integral(0.5, 2.0) == doctest::Approx(0.5 * (3.0 + 4.0) * 0.5 + 0.5 * (4.0 + 2.0) * 1.0));
  CHECK(t.max_on(0.0, 3.0) == doctest::Approx(4.0));
}

TEST_CASE("counts csv round trip and horizon defaulting") {
  testutil::TempDir tmp("csv");
  CountMatrix m;
  m.horizon = {4.0, 4};
  m.days = {{1, 2, 3, 4}, {0, 0, 7, 9}};
  save_counts_csv(tmp.file("c.csv"), m);
  const CountMatrix r = load_counts_csv(tmp.file("c.csv"), 4.0);
  CHECK(r.days == m.days);
  CHECK(r.horizon.t_end == doctest::Approx(4.0));
  const CountMatrix def = load_counts_csv(tmp.file("c.csv"));
  CHECK(def.horizon.t_end == doctest::Approx(4.0));  // one hour per interval
}

TEST_CASE("counts csv tolerates a header row") {
  testutil::TempDir tmp("csvh");
  std::ofstream(tmp.file("h.csv")) << "i1,i2,i3\n1,2,3\n4,5,6\n";
  const CountMatrix r = load_counts_csv(tmp.file("h.csv"));
  CHECK(r.num_days() == 2);
  CHECK(r.days[1] == CountVector{4, 5, 6});
}

TEST_CASE("counts csv errors name the offending cell") {
  testutil::TempDir tmp("csve");
  std::ofstream(tmp.file("ragged.csv")) << "1,2,3\n4,5\n";
  CHECK_THROWS_WITH_AS(load_counts_csv(tmp.file("ragged.csv")),
                       doctest::Contains("row 2"), std::runtime_error);
  std::ofstream(tmp.file("frac.csv")) << "1,2,3\n4,5,6.5\n";
  CHECK_THROWS_WITH_AS(load_counts_csv(tmp.file("frac.csv")),
                       doctest::Contains("column 3"), std::runtime_error);
  std::ofstream(tmp.file("neg.csv")) << "1,-2,3\n";
  CHECK_THROWS_AS(load_counts_csv(tmp.file("neg.csv")), std::runtime_error);
  CHECK_THROWS_AS(load_counts_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("epochs csv round trip") {
  testutil::TempDir tmp("eps");
  EpochList e{{0.125, 0.25, 7.0000001}};
  save_epochs_csv(tmp.file("e.csv"), e);
  const EpochList r = load_epochs_csv(tmp.file("e.csv"));
  CHECK(r.times == e.times);
}

TEST_CASE("incomplete gamma: known values and inverse round trip") {
  // P(1, x) = 1 - exp(-x).
  CHECK(gamma_p(1.0, 0.7) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-12));
  // Chi-square(2k)/2 identity: P(2, 2) = 1 - e^-2 (1 + 2).
  CHECK(gamma_p(2.0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0) * 3.0).epsilon(1e-12));
  for (double a : {0.3, 1.0, 4.5, 80.0, 1e4}) {
    for (double u : {1e-6, 0.025, 0.5, 0.975, 0.999999}) {
      const double x = gamma_p_inv(a, u);
      CHECK(gamma_p(a, x) == doctest::Approx(u).epsilon(1e-8));
    }
  }
}

TEST_CASE("normal cdf/quantile consistency") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  for (double u : {0.001, 0.025, 0.4, 0.975, 0.9999})
    CHECK(normal_cdf(normal_quantile(u)) == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("type-7 quantile matches hand values") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_type7(x, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_type7(x, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_type7(x, 0.0) == doctest::Approx(1.0));
  CHECK(quantile_type7(x, 1.0) == doctest::Approx(4.0));
  CHECK(quantile_type7({5.0}, 0.8) == doctest::Approx(5.0));
}
