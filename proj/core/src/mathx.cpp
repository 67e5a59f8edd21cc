#include "dswgan/mathx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dswgan {

namespace {

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p: a must be > 0");
  if (x < 0.0) throw std::domain_error("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u must be in (0,1)");
  // Acklam's approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley-free Newton polish.
  const double e = normal_cdf(x) - u;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  if (pdf > 0.0) x -= e / pdf;
  return x;
}

double gamma_p_inv(double a, double u) {
  if (!(a > 0.0)) throw std::domain_error("gamma_p_inv: a must be > 0");
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("gamma_p_inv: u must be in [0,1)");
  if (u == 0.0) return 0.0;

  // Wilson-Hilferty start; for small quantiles the left-tail series
  // P(a,x) ~ x^a / (a Gamma(a)) gives a far better seed.
  double x;
  if (u < 1e-3) {
    x = std::exp((std::log(u) + std::log(a) + std::lgamma(a)) / a);
  } else {
    const double z = normal_quantile(std::min(std::max(u, 1e-300), 1.0 - 1e-16));
    const double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
    x = a * t * t * t;
  }
  if (!(x > 0.0) || !std::isfinite(x)) x = a;

  // Newton in log space keeps the iteration well-scaled for x near zero.
  double y = std::log(x);
  double ylo = -std::numeric_limits<double>::infinity();
  double yhi = std::numeric_limits<double>::infinity();
  const double lg = std::lgamma(a);
  for (int it = 0; it < 200; ++it) {
    x = std::exp(y);
    const double p = gamma_p(a, x);
    if (p > u)
      yhi = y;
    else
      ylo = y;
    const double dlog = a * y - x - lg;  // log(pdf * x)
    double ynext;
    if (std::isfinite(dlog) && dlog > -700.0) {
      // Flat tails make raw Newton steps huge; cap the log-space move.
      double step = (p - u) / std::exp(dlog);
      step = std::min(std::max(step, -2.0), 2.0);
      ynext = y - step;
    } else {
      ynext = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(ynext > ylo && ynext < yhi)) {
      if (std::isfinite(ylo) && std::isfinite(yhi))
        ynext = 0.5 * (ylo + yhi);
      else if (std::isfinite(ylo))
        ynext = y + 1.0;
      else
        ynext = y - 1.0;
    }
    const double dx = std::fabs(std::exp(ynext) - std::exp(y));
    if (std::fabs(ynext - y) <= 1e-14 * std::max(1.0, std::fabs(y)) || dx <= 1e-15 * x) {
      y = ynext;
      break;
    }
    y = ynext;
  }
  return std::exp(y);
}

double quantile_type7_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_type7(std::vector<double> sample, double q) {
  std::sort(sample.begin(), sample.end());
  return quantile_type7_sorted(sample, q);
}

}  // namespace dswgan
