#include <doctest.h>

#include <cmath>

#include "aztec/finite.hpp"
#include "aztec/sampler.hpp"

using namespace aztec;

namespace {

double enum_freq(int n, const std::vector<int>& times, const std::vector<long>& levels) {
  auto all = enumerate_tilings(n);
  long c = 0;
  for (const auto& t : all) {
    TopCurveY y = x_to_y(top_curve(t), n);
    bool in = true;
    for (std::size_t i = 0; i < times.size(); ++i) in = in && y.at(times[i]) <= levels[i];
    c += in;
  }
  return double(c) / all.size();
}

}  // namespace

TEST_CASE("p and q coefficients") {
  const Krawtchouk& K = krawtchouk(4);
  const std::vector<double> p40{-1, 0, 0, 0, 1, 4, 10, 20, 35, 56};
  for (long x = -4; x <= 5; ++x) CHECK(double(K.p(0, x)) == doctest::Approx(p40[x + 4]));
  for (int n = 1; n <= 6; ++n)
    for (int s = 0; s <= n; ++s)
      for (long y = s - n - 3; y <= s + 3; ++y)
        if (s - y < 0 || s - y > n) CHECK(krawtchouk(n).q(s, y) == 0);
  for (long x = 0; x <= 6; ++x) CHECK(K.p(4, x) == 0);
  CHECK_THROWS(K.p(4, -1));
}

TEST_CASE("exact and contour evaluations agree") {
  for (int n : {3, 7, 12})
    for (int s = 0; s < n; s += 2)
      for (long y = s - n; y <= s; ++y) {
        const double e = q_fn(n, s, y);
        CHECK(std::abs(q_quadrature_adaptive(n, s, y, ContourSpec::gamma0()) - e) <= 1e-10 * std::max(1.0, std::abs(e)));
      }
  for (int n : {3, 7, 12})
    for (int r = 0; r < n; r += 3)
      for (long x = -n + r; x <= -n + r + 8; ++x) {
        const double e = p_fn(n, r, x);
        CHECK(std::abs(p_fn(n, r, x, EvalMode::Quadrature) - e) <= 1e-10 * std::max(1.0, std::abs(e)));
      }
}

TEST_CASE("shift identities") {
  for (int n = 1; n <= 8; ++n) {
    ShiftResidual r = shift_identity_residual(n);
    CHECK(r.q_side < 1e-10);
    CHECK(r.p_side < 1e-10);
  }
  Krawtchouk& k6 = krawtchouk_mutable(6);
  k6.corrupt_q(2, 1, 1e-6L);
  CHECK(shift_identity_residual(6).q_side > 1e-7);
  k6.corrupt_q(2, 1, -1e-6L);
  CHECK(shift_identity_residual(6).q_side < 1e-10);
}

TEST_CASE("kernel by series and by double contour") {
  for (auto [r, x, s, y] : std::vector<std::array<long, 4>>{{2, 1, 2, 1}, {2, 0, 4, 1}, {4, 2, 2, 0}, {6, 3, 4, 2}})
    CHECK(ktilde(5, int(r), x, int(s), y) ==
          doctest::Approx(ktilde_double_contour(5, int(r), x, int(s), y)).epsilon(1e-9));
  CHECK_THROWS_AS(ktilde(5, 3, 0, 2, 0), DomainError);
}

TEST_CASE("frozen joint and hitting probabilities at n = 4") {
  CHECK(joint_cdf_Y(4, {2, 4, 6}, {1, 1, 0}).value == doctest::Approx(3.0 / 32).epsilon(1e-12));
  CHECK(joint_cdf_Y_pathintegral(4, {2, 4, 6}, {1, 1, 0}).det.value == doctest::Approx(3.0 / 32).epsilon(1e-12));
  CHECK(stay_below_caps(4, 1, {1, 1, 0}).value == doctest::Approx(3.0 / 32).epsilon(1e-12));
  CHECK(stay_below_caps(4, 2, {1, 0}).value == doctest::Approx(3.0 / 32).epsilon(1e-12));
  CHECK(stay_below_caps(4, 1, {0}).value == doctest::Approx(1.0 / 8).epsilon(1e-12));
  CHECK(stay_below_caps(4, 1, {1, 2, 1}).value == doctest::Approx(1.0 / 2).epsilon(1e-12));
  CHECK(enum_freq(4, {2, 4, 6}, {1, 1, 0}) == 3.0 / 32);
}

TEST_CASE("determinants match enumeration for n <= 3") {
  for (int n = 2; n <= 3; ++n)
    for (int a = 2; a <= 2 * n - 2; a += 2)
      for (long va = -1; va <= a / 2 + 1; ++va) {
        CHECK(std::abs(joint_cdf_Y(n, {a}, {va}).value - enum_freq(n, {a}, {va})) < 1e-10);
        for (int b = a + 2; b <= 2 * n - 2; b += 2)
          for (long vb = -1; vb <= b / 2 + 1; ++vb)
            CHECK(std::abs(joint_cdf_Y(n, {a, b}, {va, vb}).value - enum_freq(n, {a, b}, {va, vb})) < 1e-10);
      }
}

TEST_CASE("levels below the support") {
  for (long v = -5; v <= -2; ++v) CHECK(joint_cdf_Y(3, {2}, {v}).value == enum_freq(3, {2}, {v}));
  CHECK(joint_cdf_Y(3, {2, 4}, {1, -4}).value == 0);
}

TEST_CASE("three formulas agree") {
  for (long a = -1; a <= 2; ++a)
    for (long b = -1; b <= 2; ++b) {
      const double j = joint_cdf_Y(3, {2, 4}, {a, b}).value;
      PathIntegralResult pi = joint_cdf_Y_pathintegral(3, {2, 4}, {a, b});
      CHECK(std::abs(pi.det.value - j) < 1e-8);
      CHECK(pi.path_weight_discrepancy < 1e-10);
      CHECK(std::abs(stay_below_caps(3, 1, {a, b}).value - j) < 1e-8);
    }
  for (int i = 0; i < 3; ++i)
    for (long x = -1; x <= 2; ++x)
      for (long w = -1; w <= 3; ++w)
        CHECK(path_weight_operator({2, 4, 6}, {1, 1, 0}, i, x, w) ==
              doctest::Approx(path_weight_bridge({2, 4, 6}, {1, 1, 0}, i, x, w)).epsilon(1e-10));
}

TEST_CASE("hitting kernel assemblies and conjugation") {
  for (auto caps : std::vector<std::vector<long>>{{1, 1, 0}, {2, 1, 3, 2}, {0, 5, 1}}) {
    HittingKernel a = build_hitting_kernel(6, 1, caps), b = build_hitting_kernel_dense(6, 1, caps);
    REQUIRE(a.imax == b.imax);
    for (int i = 0; i <= a.imax; ++i)
      for (int j = 0; j <= a.imax; ++j) CHECK(std::abs(a.K[i][j] - b.K[i][j]) < 1e-10);
    CHECK(std::abs(stay_below_caps(6, 1, caps, 1.0).value - stay_below_caps(6, 1, caps, kSilver).value) < 1e-10);
  }
  FiniteDet big = stay_below_prob_finite(60, BarrierSpec::parabola(1, -2, 1), -2, 1);
  CHECK(big.value > 0);
  CHECK(big.value < 1);
  CHECK(big.stability_delta < 1e-10);
  CHECK_FALSE(big.clamped);
  // A looser barrier can only raise the probability.
  CHECK(stay_below_prob_finite(60, BarrierSpec::parabola(2, -2, 1), -2, 1).value >= big.value);
}

TEST_CASE("window stability of the joint CDF") {
  FiniteDet d = joint_cdf_Y(12, {6, 10, 14}, {4, 5, 6});
  CHECK(d.stability_delta < 1e-10);
  CHECK(d.value >= 0);
  CHECK(d.value <= 1);
}

TEST_CASE("contour advisor") {
  SteepDescentReport z = contour_advisor(0);
  CHECK(z.z_plus.real() == doctest::Approx(kWalkP));
  CHECK(z.z_minus.real() == doctest::Approx(kWalkP));
  CHECK_FALSE(z.complex_pair);
  SteepDescentReport c = contour_advisor(-0.5);
  CHECK(c.complex_pair);
  CHECK(std::abs(c.z_plus.imag()) > 0);
  CHECK(c.z_plus == std::conj(c.z_minus));
  CHECK(steep_rhs(kWalkP) == doctest::Approx(1.0));
  for (double rho : {0.2, 0.3}) CHECK(steep_rhs(rho) > 1);
  CHECK(steep_rhs(0.5) < 1);
}

TEST_CASE("rescaled P and Q") {
  RescaledPQ r = rescaled_PQ(200, 0.2, 0.5, -1.0, 0.3);
  CHECK(std::isfinite(r.P));
  CHECK(std::isfinite(r.Q));
  CHECK(std::abs(r.t_eff - 0.2) < 0.05);
  CHECK(std::abs(r.zy_eff - 0.5) < 0.3);
  CHECK_THROWS_AS(rescaled_PQ(20, 0.0, -40, -1, 0), DomainError);
}
