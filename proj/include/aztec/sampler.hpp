#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "aztec/lattice.hpp"

namespace aztec {

std::uint64_t splitmix64(std::uint64_t& state);

// Reproducible stream: mt19937_64 seeded with splitmix64(seed, stream).
// uniform() uses the top 53 bits, so values match across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool coin() { return (eng_() >> 63) != 0; }
  std::uint64_t below(std::uint64_t m);

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 eng_;
};

struct RestrictionParams {
  double R = std::numeric_limits<double>::infinity();
  double r(int n) const { return ScalingMap{n, R}.r(); }
  // Largest admissible integer x (X = x - 1/2); huge when R = +inf.
  int cap(int n) const;
};

bool satisfies_restriction(const TopCurveX& x, int cap);

Tiling shuffle_grow(const Tiling& t, RngStream& rng);
Tiling sample_uniform(int n, RngStream& rng);

struct RestrictedSample {
  Tiling tiling;
  std::uint64_t attempts = 0;
  bool accepted = false;
};

RestrictedSample sample_restricted(int n, const RestrictionParams& p, RngStream& rng,
                                   std::uint64_t budget = 1000000);

std::vector<Tiling> enumerate_tilings(int n);

// Canonical key used to compare tilings (sorted anchors).
std::string tiling_key(const Tiling& t);

// Rotates a random 2x2 block of two parallel dominoes; returns true if the move was made.
bool mcmc_rotation_step(Tiling& t, const std::optional<RestrictionParams>& restriction,
                        RngStream& rng);

struct SampleBatch {
  std::uint64_t attempts = 0;
  std::uint64_t accepts = 0;
  std::vector<TopCurveX> curves;
};

}  // namespace aztec
