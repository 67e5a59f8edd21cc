#include "dswgan/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dswgan {

namespace {

constexpr unsigned __int128 kPcgMult =
    (static_cast<unsigned __int128>(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;

inline std::uint64_t rotr64(std::uint64_t x, unsigned r) {
  return (x >> r) | (x << ((64u - r) & 63u));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // pcg_setseq seeding: the increment encodes the stream, the state the seed.
  inc_ = ((static_cast<unsigned __int128>(stream_id) << 64 | (stream_id ^ 0xda3e39cb94b95bdbULL)) << 1) | 1u;
  state_ = 0;
  state_ = state_ * kPcgMult + inc_;
  state_ += (static_cast<unsigned __int128>(seed) << 64) | (seed ^ 0x9e3779b97f4a7c15ULL);
  state_ = state_ * kPcgMult + inc_;
}

std::uint64_t RngStream::next_u64() {
  const unsigned __int128 old = state_;
  state_ = old * kPcgMult + inc_;
  const std::uint64_t xored = static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
  const unsigned rot = static_cast<unsigned>(old >> 122);
  return rotr64(xored, rot);
}

double RngStream::next_uniform() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are unreachable.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_uniform_vector(RngStream& stream, int p) {
  if (p < 1) throw std::domain_error("sample_uniform_vector: p must be >= 1");
  std::vector<double> u(static_cast<std::size_t>(p));
  for (auto& x : u) x = stream.next_uniform();
  return u;
}

namespace {

std::int64_t poisson_inversion(RngStream& stream, double rate) {
  const double u = stream.next_uniform();
  double prob = std::exp(-rate);
  double cum = prob;
  std::int64_t k = 0;
  while (u > cum && k < 10000) {
    ++k;
    prob *= rate / static_cast<double>(k);
    cum += prob;
  }
  return k;
}

// Transformed rejection with squeeze (Hormann 1993), valid for rate >= 10.
std::int64_t poisson_ptrd(RngStream& stream, double rate) {
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_rate = std::log(rate);

  for (;;) {
    double u = stream.next_uniform() - 0.5;
    const double v = stream.next_uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_rate - rate - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(kf);
  }
}

}  // namespace

std::int64_t sample_poisson(RngStream& stream, double rate) {
  if (!(rate >= 0.0)) throw std::domain_error("sample_poisson: rate must be >= 0");
  if (rate == 0.0) return 0;
  if (rate < 30.0) return poisson_inversion(stream, rate);
  return poisson_ptrd(stream, rate);
}

double sample_normal(RngStream& stream) {
  const double u1 = stream.next_uniform();
  const double u2 = stream.next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sample_gamma(RngStream& stream, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("sample_gamma: shape and rate must be > 0");
  if (shape < 1.0) {
    // Boost: draw Gamma(shape+1) and scale by U^{1/shape}.
    const double g = sample_gamma(stream, shape + 1.0, rate);
    const double u = stream.next_uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_normal(stream);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = stream.next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_lognormal(RngStream& stream, double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0))
    throw std::domain_error("sample_lognormal: mean and variance must be > 0");
  const double sigma2 = std::log1p(variance / (mean * mean));
  const double mu = std::log(mean) - 0.5 * sigma2;
  return std::exp(mu + std::sqrt(sigma2) * sample_normal(stream));
}

}  // namespace dswgan
