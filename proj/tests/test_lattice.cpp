#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "aztec/lattice.hpp"
#include "aztec/sampler.hpp"

using namespace aztec;

TEST_CASE("domain has 2n(n+1) squares and the fixed coloring") {
  for (int n = 1; n <= 6; ++n) {
    AztecDomain d(n);
    CHECK(d.squares().size() == d.square_count());
    CHECK(d.square_count() == std::size_t(2 * n * (n + 1)));
    for (int l = 0; l < n; ++l) {
      int k = -n;
      while (!d.contains(k, l)) ++k;
      CHECK(d.is_white(k, l));
    }
    for (const Square& s : d.squares()) CHECK(d.is_white(s.k, s.l) != d.is_white(s.k + 1, s.l));
  }
  CHECK_THROWS_AS(AztecDomain(-1), DomainError);
}

TEST_CASE("enumeration counts") {
  CHECK(enumerate_tilings(1).size() == 2);
  CHECK(enumerate_tilings(2).size() == 8);
  CHECK(enumerate_tilings(3).size() == 64);
  CHECK(enumerate_tilings(4).size() == 1024);
  CHECK_THROWS(enumerate_tilings(5));
  for (int n = 1; n <= 3; ++n) {
    std::set<std::string> keys;
    for (const auto& t : enumerate_tilings(n)) {
      CHECK(validate_tiling(t).ok);
      CHECK(t.dominoes.size() == std::size_t(n * (n + 1)));
      keys.insert(tiling_key(t));
    }
    CHECK(keys.size() == enumerate_tilings(n).size());
  }
}

TEST_CASE("validation reports defects") {
  Tiling t = enumerate_tilings(2).front();
  t.dominoes.pop_back();
  ValidationReport r = validate_tiling(t);
  CHECK_FALSE(r.ok);
  CHECK(r.uncovered.size() == 2);
  t.dominoes.push_back(t.dominoes.front());
  r = validate_tiling(t);
  CHECK_FALSE(r.ok);
  CHECK(r.doubly_covered.size() == 2);
}

TEST_CASE("class depends only on anchor parity and orientation") {
  for (int n = 1; n <= 3; ++n) {
    AztecDomain dom(n);
    std::map<std::pair<int, int>, DominoClass> seen;
    for (const auto& t : enumerate_tilings(n))
      for (const auto& d : t.dominoes) {
        const std::pair<int, int> key{int(d.orient), dom.is_white(d.x, d.y)};
        auto [it, fresh] = seen.emplace(key, classify_domino(d, dom));
        CHECK(it->second == classify_domino(d, dom));
      }
    CHECK(seen.size() == 4);
  }
}

TEST_CASE("top curve, Y and the event dictionary on all small tilings") {
  for (int n = 1; n <= 3; ++n)
    for (const auto& t : enumerate_tilings(n)) {
      TopCurveX x = top_curve(t);
      CHECK(x.at(-n) == 0);
      CHECK(x.at(n) == 0);
      CHECK(x.height(-n) == -0.5);
      for (int s = -n; s < n; ++s) CHECK(std::abs(x.at(s + 1) - x.at(s)) <= 1);
      TopCurveY y = x_to_y(x, n);
      CHECK(y_step_law_ok(y));
      CHECK(north_polar_region_ok(t, x));
      for (int tt = -n; tt <= n; ++tt)
        for (int v = -2 * n; v <= 2 * n; ++v) {
          const int s = tt + v + n;
          if (s < 0 || s > 2 * n) continue;
          CHECK((x.at(tt) <= v) == (y.at(s) <= v));
        }
      LineEnsemble le = tiling_to_lines(t);
      CHECK(le.top.x == x.x);
      CHECK(!le.paths.empty());
    }
}

TEST_CASE("Y step law rejects bad steps") {
  TopCurveY y{2, {0, 1, 1, 2, 0}};
  CHECK(y_step_law_ok(y));
  y.y[1] = 2;  // odd step up by two
  CHECK_FALSE(y_step_law_ok(y));
  y = TopCurveY{2, {0, 1, 2, 2, 0}};  // even step up
  CHECK_FALSE(y_step_law_ok(y));
}

TEST_CASE("polar region on sampled tilings") {
  RngStream rng(3, 0);
  for (int i = 0; i < 5; ++i) {
    Tiling t = sample_uniform(30, rng);
    CHECK(north_polar_region_ok(t, top_curve(t)));
    CHECK(!north_polar_region(t).empty());
  }
}

TEST_CASE("scaling map") {
  ScalingMap s{100, 1.0};
  CHECK(s.r() == doctest::Approx(100 / std::sqrt(2.0) + std::pow(2.0, -5.0 / 6) * std::cbrt(100.0)));
  CHECK(s.b_real(1) > s.b_real(0));
  CHECK(s.b_real(2) - s.b_real(1) == doctest::Approx(s.b_real(1) - s.b_real(0)));
  for (double tau : {-3.0, -0.7, 0.0, 0.4, 2.5}) {
    CHECK(s.b_even(tau) % 2 == 0);
    CHECK(std::abs(s.b_even(tau) - s.b_real(tau)) <= 1.0);
    CHECK(s.tau_of_time(s.b_real(tau)) == doctest::Approx(tau));
  }
  CHECK(s.g_n(0.5, 1.25) == doctest::Approx(s.r()));
  CHECK(s.cap_x() == int(std::floor(s.r() + 0.5)));
}

TEST_CASE("barrier specs") {
  BarrierSpec p = BarrierSpec::parabola(1, -2, 2);
  CHECK(p.value(1.5) == doctest::Approx(3.25));
  CHECK(std::isinf(p.value(3)));
  BarrierSpec w = BarrierSpec::parabola_with_point(1, -0.5, 0.3, -1, 1);
  CHECK(w.value(0.3) == doctest::Approx(-0.5 + 0.09));
  CHECK(w.value(0.2) == doctest::Approx(1.04));
  BarrierSpec st = BarrierSpec::step_down(0, 0.5, 0.5, -1, 1);
  CHECK(st.value(0.25) == doctest::Approx(0.0625));
  CHECK(st.value(0.75) == doctest::Approx(0.5625 - 0.5));
  CHECK(BarrierSpec::v_shape(0.5, 3, -3, 3).value(-1) == doctest::Approx(3.5));
  CHECK(std::isinf(BarrierSpec::none().value(0)));
  BarrierSpec bad;
  bad.pieces.push_back({1, 0, [](double) { return 0.0; }});
  CHECK_THROWS_AS(bad.check(), DomainError);
  BarrierSpec overlap;
  overlap.pieces.push_back({0, 2, [](double) { return 0.0; }});
  overlap.pieces.push_back({1, 3, [](double) { return 0.0; }});
  CHECK_THROWS_AS(overlap.check(), DomainError);
}

TEST_CASE("discretized barrier") {
  DiscreteBarrier db = discretize_barrier(100, BarrierSpec::parabola(1, -1, 1), -1, 1);
  ScalingMap s{100, 0};
  CHECK(db.m0 == s.b_even(-1) / 2);
  CHECK(db.m1 == s.b_even(1) / 2);
  for (int c : db.caps) CHECK(c < kNoCap);
  CHECK_THROWS_AS(discretize_barrier(10, BarrierSpec::parabola(1, -10, 1), -10, 1), DomainError);
}
