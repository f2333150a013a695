#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace aztec {

inline const double kSqrt2 = 1.41421356237309504880;
inline const double kSilver = 2.41421356237309504880;  // sqrt(2) + 1
inline const double kWalkP = 0.41421356237309504880;   // sqrt(2) - 1

// Step laws of X1, X2 and X = X1 + X2.
struct StepLaw {
  static double x1(int k);
  static double x2(int k);
  static double x(int k);  // closed form
  // Convolution of x1 and x2 truncated where the X2 tail is below tol.
  static double x_by_convolution(int k, double tol = 1e-16);
  static double mean();
  static double variance();
};

double step_pmf(int k);
double transition_T(long x, long y);
// Checks T(x,y) = (sqrt2+1)^{2-y+x} P(X=y-x); returns the absolute deviation.
double transition_identity_residual(long x, long y);

struct WalkPmf {
  int lo = 0;  // pmf[i] = P(S_m = lo + i)
  std::vector<double> pmf;
  double lost_mass = 0;
  double at(long d) const {
    long i = d - lo;
    return (i < 0 || i >= static_cast<long>(pmf.size())) ? 0.0 : pmf[static_cast<std::size_t>(i)];
  }
};

// One step of the walk applied to a density on [lo, ...]; mass falling below lo is dropped.
std::vector<double> walk_step(const std::vector<double>& f, double* dropped = nullptr);

WalkPmf walk_pmf(int m, double tail_tol = 1e-14);

struct TPower {
  double prob = 0;    // P(S_m = d)
  double weight = 0;  // T^m(x, x+d)
};
TPower t_power_pmf(int m, long d);
// Exact integer T^m(x,y) as a double (binomial sum).
double t_power_exact(int m, long x, long y);

inline constexpr long kNoCapL = std::numeric_limits<long>::max() / 4;

// caps[k] for k = 0..m (kNoCapL for no constraint). Probability that start + S_k <= caps[k]
// for all k, given start + S_m = end.
struct BridgeResult {
  double probability = 0;
  double free_bridge = 0;   // P(S_m = end - start)
  double capped_joint = 0;  // P(S_m = end - start, capped)
  bool degenerate = false;
};
BridgeResult bridge_stay_below(int m, long start, long end, const std::vector<long>& caps);

struct HitAtom {
  int l = 0;
  long v = 0;
  double p = 0;
};
struct FirstPassage {
  std::vector<HitAtom> hits;
  double survival = 0;
  double hit_mass() const;
};
// caps[l - m0], l = m0..m1. First l >= m0 with u + S_{l-m0} > cap(l).
FirstPassage first_passage_dp(long u, int m0, const std::vector<long>& caps);

double rate_I(double x);
double rate_I_legendre(double x);
double ldp_bound(int m, double x);
double ldp_quadratic_bound(int m, double x, double eps);
// Minimum of I(x)/x^2 over a grid on (0, 1].
double rate_epsilon(int grid = 20000);

}  // namespace aztec
