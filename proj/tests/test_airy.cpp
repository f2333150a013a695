#include <doctest.h>

#include <cmath>

#include "aztec/airy.hpp"
#include "aztec/quadrature.hpp"

using namespace aztec;

namespace {

// Maclaurin series in long double, independent of the library evaluation.
long double airy_series(long double x) {
  const long double c1 = 0.355028053887817239260L, c2 = 0.258819403792806798405L;
  long double f = 1, g = x, sf = 1, sg = x;
  for (int k = 1; k < 200; ++k) {
    f *= x * x * x / ((3.0L * k - 1) * (3.0L * k));
    g *= x * x * x / ((3.0L * k) * (3.0L * k + 1));
    sf += f;
    sg += g;
  }
  return c1 * sf - c2 * sg;
}

}  // namespace

TEST_CASE("Airy function values") {
  CHECK(airy_ai(0) == doctest::Approx(1 / (std::pow(3.0, 2.0 / 3) * std::tgamma(2.0 / 3))).epsilon(1e-15));
  CHECK(airy_ai_prime(0) == doctest::Approx(-1 / (std::pow(3.0, 1.0 / 3) * std::tgamma(1.0 / 3))).epsilon(1e-15));
  for (double x = -6; x <= 3; x += 0.25) CHECK(std::abs(airy_ai(x) - double(airy_series(x))) < 1e-13);
  // Ai'' = x Ai by central differences.
  for (double x : {-5.0, -1.3, 0.4, 2.2}) {
    const double h = 1e-4;
    const double d2 = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / (h * h);
    CHECK(d2 == doctest::Approx(x * airy_ai(x)).epsilon(1e-6));
  }
  for (double x : {0.5, 5.0, 40.0}) CHECK(log_airy_ai(x) == doctest::Approx(std::log(airy_ai(x))).epsilon(1e-12));
  CHECK(std::isfinite(log_airy_ai(1e4)));
}

TEST_CASE("tilted Airy") {
  for (double x : {-2.0, 0.0, 1.5}) CHECK(tilted_airy(0, x) == doctest::Approx(airy_ai(x)));
  const double s = 0.7, x = -0.4;
  CHECK(tilted_airy(s, x) == doctest::Approx(std::exp(2 * s * s * s / 3 + x * s) * airy_ai(s * s + x)));
  CHECK(tilted_airy(s, x, 1.0) == doctest::Approx(std::exp(1.0) * tilted_airy(s, x)));
  // Far out the direct product overflows; the log-space route does not.
  CHECK(std::isfinite(tilted_airy(12, 0)));
  CHECK(tilted_airy(12, 0) > 0);
  CHECK_THROWS_AS(airy_ai(-300), OverflowError);
  CHECK(tilted_airy(5, 3) > 0);
}

TEST_CASE("heat kernel and reflection") {
  Rule r = composite(-40, 40, 0.5, 16);
  double mass = 0, ck = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    mass += r.w[i] * phi(0.7, 0.3, r.x[i]);
    ck += r.w[i] * phi(0.3, 0.1, r.x[i]) * phi(0.4, r.x[i], -0.5);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ck == doctest::Approx(phi(0.7, 0.1, -0.5)).epsilon(1e-12));
  CHECK(reflection_T(1, 0.5, 0.2, 0.0) == 0);
  CHECK(reflection_T(1, -0.5, -0.2, 0.0) > 0);
  CHECK(reflection_T(1, -0.5, -0.2, 0.0) < phi(1, -0.5, -0.2));
}

TEST_CASE("quadrature rules") {
  Rule g = gl_interval(0, 2, 10);
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::pow(g.x[i], 19);
  CHECK(s == doctest::Approx(std::pow(2.0, 20) / 20).epsilon(1e-13));
  Rule c = composite(-1, 3, 0.7, 8, {0.25});
  bool has_break = false;
  double w = 0;
  for (std::size_t i = 0; i < c.size(); ++i) w += c.w[i];
  CHECK(w == doctest::Approx(4.0));
  for (std::size_t i = 0; i + 1 < c.size(); ++i) has_break = has_break || (c.x[i] < 0.25 && c.x[i + 1] > 0.25);
  CHECK(has_break);
  FredholmResult f = finalize(1 + 1e-6, 1e-9, 10, 5, "test");
  CHECK(f.value == 1);
  CHECK(f.clamped);
  CHECK(finalize(0.5, 1e-9, 10, 5, "test").value == 0.5);
}
