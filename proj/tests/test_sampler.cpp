#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>

#include "aztec/sampler.hpp"

using namespace aztec;

namespace {

double chi_square_p(const std::vector<long>& counts, const std::vector<double>& expected) {
  double chi = 0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    chi += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
  boost::math::chi_squared d(double(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(d, chi));
}

std::map<std::string, int> index_of(const std::vector<Tiling>& all) {
  std::map<std::string, int> m;
  for (std::size_t i = 0; i < all.size(); ++i) m[tiling_key(all[i])] = int(i);
  return m;
}

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  RngStream r(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0);
    CHECK(u < 1);
    CHECK(r.below(7) < 7);
  }
  RngStream s1(11, 2), s2(11, 2);
  CHECK(tiling_key(sample_uniform(15, s1)) == tiling_key(sample_uniform(15, s2)));
}

TEST_CASE("uniform sampler covers exactly") {
  for (int n : {1, 2, 5, 20, 60}) {
    RngStream r(2, std::uint64_t(n));
    Tiling t = sample_uniform(n, r);
    CHECK(t.n == n);
    CHECK(validate_tiling(t).ok);
  }
  RngStream r(2, 0);
  Tiling t = sample_uniform(3, r);
  Tiling grown = shuffle_grow(t, r);
  CHECK(grown.n == 4);
  CHECK(validate_tiling(grown).ok);
}

TEST_CASE("n=1 frequencies are one half") {
  const long N = 20000;
  auto idx = index_of(enumerate_tilings(1));
  long first = 0;
  for (long i = 0; i < N; ++i) {
    RngStream r(13, std::uint64_t(i));
    first += idx.at(tiling_key(sample_uniform(1, r))) == 0;
  }
  CHECK(std::abs(first / double(N) - 0.5) < 3 * std::sqrt(0.25 / N));
}

TEST_CASE("n=2 chi-square against enumeration") {
  auto all = enumerate_tilings(2);
  auto idx = index_of(all);
  const long N = 40000;
  std::vector<long> c(all.size(), 0);
  for (long i = 0; i < N; ++i) {
    RngStream r(17, std::uint64_t(i));
    ++c[idx.at(tiling_key(sample_uniform(2, r)))];
  }
  CHECK(chi_square_p(c, std::vector<double>(all.size(), double(N) / all.size())) > 1e-3);
}

TEST_CASE("restricted sampler") {
  RngStream r(5, 0);
  RestrictedSample free = sample_restricted(10, RestrictionParams{}, r);
  CHECK(free.accepted);
  CHECK(free.attempts == 1);
  for (int i = 0; i < 10; ++i) {
    RestrictedSample s = sample_restricted(30, RestrictionParams{0.5}, r);
    REQUIRE(s.accepted);
    CHECK(s.attempts >= 1);
    CHECK(satisfies_restriction(top_curve(s.tiling), RestrictionParams{0.5}.cap(30)));
  }
  RestrictedSample hopeless = sample_restricted(30, RestrictionParams{-40}, r, 20);
  CHECK_FALSE(hopeless.accepted);
  CHECK(hopeless.attempts == 20);
}

TEST_CASE("half-integer cap") {
  for (int n : {10, 50, 200})
    for (double R : {-1.0, 0.0, 1.0, 2.0}) {
      const double rr = ScalingMap{n, R}.r();
      const int c = RestrictionParams{R}.cap(n);
      CHECK(c - 0.5 <= rr);
      CHECK(c + 0.5 > rr);
    }
}

TEST_CASE("rotation chain") {
  RngStream r(21, 0);
  auto t1 = enumerate_tilings(1);
  Tiling t = t1[0];
  CHECK(mcmc_rotation_step(t, std::nullopt, r));
  CHECK(tiling_key(t) == tiling_key(t1[1]));

  auto all = enumerate_tilings(2);
  auto idx = index_of(all);
  Tiling s = all[0];
  std::vector<long> c(all.size(), 0);
  const long steps = 1000000;
  for (long i = 0; i < steps; ++i) {
    mcmc_rotation_step(s, std::nullopt, r);
    if (i % 50 == 0) ++c[idx.at(tiling_key(s))];
  }
  CHECK(validate_tiling(s).ok);
  long total = 0;
  for (long v : c) total += v;
  CHECK(chi_square_p(c, std::vector<double>(all.size(), double(total) / all.size())) > 1e-3);

  // A restriction that excludes some tilings keeps the chain inside the allowed set.
  auto all3 = enumerate_tilings(3);
  const RestrictionParams rp{-1.0};
  const int cap = rp.cap(3);
  Tiling u;
  std::size_t allowed = 0;
  for (const auto& x : all3)
    if (satisfies_restriction(top_curve(x), cap)) {
      if (!allowed) u = x;
      ++allowed;
    }
  REQUIRE(allowed > 0);
  REQUIRE(allowed < all3.size());
  for (int i = 0; i < 5000; ++i) {
    mcmc_rotation_step(u, rp, r);
    CHECK(satisfies_restriction(top_curve(u), cap));
  }
}
