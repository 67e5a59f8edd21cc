#pragma once

#include <cstdint>
#include <vector>

namespace dswgan {

// PCG64 (XSL-RR 128/64). A (seed, stream_id) pair fully determines the
// draw sequence; distinct stream ids select statistically independent
// streams of the same seed, so parallel replications can each take their
// own id and stay reproducible regardless of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Same seed, stream_id + k. Fan-out ops document the id ranges they use.
  RngStream substream(std::uint64_t k) const { return RngStream(seed_, stream_id_ + k); }

  std::uint64_t next_u64();
  // Strictly inside (0, 1).
  double next_uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  unsigned __int128 state_;
  unsigned __int128 inc_;
};

// Coordinatewise iid Uniform(0,1), p >= 1.
std::vector<double> sample_uniform_vector(RngStream& stream, int p);

// Exact Poisson sampler: sequential-search inversion below rate 30,
// Hormann's transformed rejection (PTRD) above. rate >= 0.
std::int64_t sample_poisson(RngStream& stream, double rate);

// Marsaglia-Tsang squeeze method; shape < 1 handled by boosting.
// Parameterized by shape and rate, mean = shape/rate.
double sample_gamma(RngStream& stream, double shape, double rate);

// Lognormal stated in natural units: requested mean and variance of the
// variate itself, converted internally to the underlying normal's (mu, sigma).
double sample_lognormal(RngStream& stream, double mean, double variance);

// Standard normal (Box-Muller, two uniforms per draw).
double sample_normal(RngStream& stream);

}  // namespace dswgan
