#include "aztec/airy.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <numbers>

namespace aztec {

namespace {
void check_range(double x) {
  if (!(std::abs(x) <= 200.0)) throw OverflowError("airy: |x| > 200 is outside the supported range");
}
}  // namespace

double airy_ai(double x) {
  check_range(x);
  if (x > 104.0) return 0.0;  // below the smallest normal double
  return boost::math::airy_ai(x);
}

double airy_ai_prime(double x) {
  check_range(x);
  if (x > 104.0) return 0.0;
  return boost::math::airy_ai_prime(x);
}

double log_airy_ai(double x) {
  if (x < 0) throw std::domain_error("log_airy_ai: x < 0");
  if (x < 30.0) return std::log(boost::math::airy_ai(x));
  // Ai(x) ~ e^{-z} / (2 sqrt(pi) x^{1/4}) * sum (-1)^k u_k / z^k,  z = 2/3 x^{3/2}.
  const double z = 2.0 / 3.0 * x * std::sqrt(x);
  double u = 1.0, term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    term = u / std::pow(z, k);
    sum += (k % 2 ? -term : term);
  }
  return -z - std::log(2.0 * std::sqrt(std::numbers::pi)) - 0.25 * std::log(x) + std::log(sum);
}

double tilted_airy(double s, double x, double log_scale) {
  const double arg = s * s + x;
  const double e = 2.0 * s * s * s / 3.0 + x * s + log_scale;
  if (arg >= 0) {
    double l = e + log_airy_ai(arg);
    if (l > 700) throw OverflowError("tilted_airy: result overflows; evaluate in log space");
    return std::exp(l);
  }
  check_range(arg);
  if (e > 700) throw OverflowError("tilted_airy: result overflows; evaluate in log space");
  return std::exp(e) * boost::math::airy_ai(arg);
}

double phi(double t, double x, double y) {
  const double d = y - x;
  return std::exp(-d * d / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
}

double reflection_T(double t, double x, double y, double h) {
  if (x > h || y > h) return 0.0;
  // phi(y - x) - phi(y + x - 2h) = phi(y - x) * (1 - exp(-(h-x)(h-y)/t))
  return phi(t, x, y) * -std::expm1(-(h - x) * (h - y) / t);
}

}  // namespace aztec
