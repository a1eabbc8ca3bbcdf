#pragma once
// Counter-keyed random streams. Every stochastic routine takes an explicit
// (seed, stream_id) pair; the same pair reproduces the same sequence
// bit-for-bit on every platform, which is what makes Monte Carlo results
// independent of worker count: work unit i always consumes stream i.
//
// Generator: xoshiro256++ seeded through SplitMix64. Gaussians use our own
// Box-Muller (std::normal_distribution is not reproducible across standard
// libraries).

#include <array>
#include <complex>
#include <cstdint>

namespace fplab {

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // uniform in [0, 1), 53-bit resolution
  double uniform01();

  // uniform in (0, 1]; safe as a log argument
  double uniform01_open_zero();

  // standard normal via Box-Muller; pairs are cached, so the n-th gaussian
  // of a stream is well defined
  double gaussian();

  // complex gaussian with E|z|^2 = sigma2, independent re/im parts
  std::complex<double> complex_gaussian(double sigma2);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Stream id of a child stream. Children with distinct tags are independent
  // of each other and of the parent, and the derivation is deterministic, so
  // routines can split one stream into several non-overlapping ones.
  static std::uint64_t child_stream(std::uint64_t stream_id, std::uint64_t tag);

 private:
  std::array<std::uint64_t, 4> s_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double cached_gaussian_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fplab
