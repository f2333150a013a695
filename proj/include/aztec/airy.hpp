#pragma once

#include <stdexcept>
#include <string>

namespace aztec {

struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ai and Ai' for |x| <= 200.
double airy_ai(double x);
double airy_ai_prime(double x);
// log Ai(x) for x >= 0 (Ai has no zeros there); uses the asymptotic series far out.
double log_airy_ai(double x);

// Ai^{(s)}(x) = exp(2s^3/3 + xs) Ai(s^2 + x), optionally times exp(log_scale).
// Assembled in log space when Ai(s^2 + x) is positive.
double tilted_airy(double s, double x, double log_scale = 0.0);

// Brownian transition kernel with diffusion coefficient 2.
double phi(double t, double x, double y);
// Killed at the constant level h: phi_t(y - x) - phi_t(y + x - 2h) for x, y <= h, else 0.
double reflection_T(double t, double x, double y, double h = 0.0);

}  // namespace aztec
