#pragma once

#include <complex>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "aztec/lattice.hpp"
#include "aztec/walk.hpp"

namespace aztec {

enum class EvalMode { Exact, Quadrature };

struct ContourSpec {
  std::complex<double> center{0.0, 0.0};
  double radius = 0.4;
  int nodes = 256;
  static ContourSpec gamma0(double radius = 0.4, int nodes = 256) { return {{0.0, 0.0}, radius, nodes}; }
  static ContourSpec gamma1(double radius = 0.55, int nodes = 256) { return {{1.0, 0.0}, radius, nodes}; }
  bool encloses(std::complex<double> z) const { return std::abs(z - center) < radius; }
};

// Exact p, q for one order n. Values returned in long double to cover the range at large n.
class Krawtchouk {
 public:
  explicit Krawtchouk(int n);
  int n() const { return n_; }
  long double q(int s, long y) const;
  long double p(int r, long x) const;
  // Test hook: perturbs one stored q coefficient.
  void corrupt_q(int s, long y, long double delta);

 private:
  int n_;
  mutable std::vector<std::vector<long double>> qcoef_;  // qcoef_[s][d], d = s - y
  mutable std::unordered_map<long long, long double> pcache_;
  std::map<std::pair<int, long>, long double> qdelta_;
};

// Shared cache per order.
const Krawtchouk& krawtchouk(int n);
Krawtchouk& krawtchouk_mutable(int n);

double q_fn(int n, int s, long y, EvalMode mode = EvalMode::Exact,
            ContourSpec c = ContourSpec::gamma0());
double p_fn(int n, int r, long x, EvalMode mode = EvalMode::Exact,
            ContourSpec c = ContourSpec::gamma1());
// Trapezoidal rule with node doubling until successive values agree to tol.
double q_quadrature_adaptive(int n, int s, long y, ContourSpec c, double tol = 1e-12);
double p_quadrature_adaptive(int n, int r, long x, ContourSpec c, double tol = 1e-12);

// Times are the even integers 2r, 2s.
double ktilde(int n, int two_r, long x, int two_s, long y);
double ktilde_double_contour(int n, int two_r, long x, int two_s, long y, int nodes = 256,
                             double rho0 = 0.4, double rho1 = 0.55);
double kn_entry(int n, int two_r, long x, int two_s, long y);

// (q_s T)(y) = q_{s+1}(y) by direct windowed sums, and the p-side identity (T p_r) = p_{r-1}
// in differenced form p_r(x) + p_r(x+1) = p_{r-1}(x) - p_{r-1}(x-1): p_r grows polynomially,
// so the undifferenced sum over y <= x does not converge.
struct ShiftResidual {
  double q_side = 0;
  double p_side = 0;
};
ShiftResidual shift_identity_residual(int n);

struct FiniteDet {
  double value = 0;
  double raw = 0;               // before clamping
  double stability_delta = 0;   // change under window doubling
  std::size_t size = 0;
  bool clamped = false;
};

FiniteDet joint_cdf_Y(int n, const std::vector<int>& even_times, const std::vector<long>& levels,
                      int margin = 0);

struct PathIntegralResult {
  FiniteDet det;
  double path_weight_discrepancy = 0;  // operator products vs bridge formula
};
PathIntegralResult joint_cdf_Y_pathintegral(int n, const std::vector<int>& even_times,
                                            const std::vector<long>& levels);
// (Pbar_{x0} T^{d1} ... Pbar_{x_{i-1}} T^{d_i})(x, w) by operator products and by the bridge law.
double path_weight_operator(const std::vector<int>& times, const std::vector<long>& levels, int i,
                            long x, long w);
double path_weight_bridge(const std::vector<int>& times, const std::vector<long>& levels, int i,
                          long x, long w);

struct HittingKernel {
  int n = 0;
  int m0 = 0;
  std::vector<long> caps;  // l = m0 .. m0 + caps.size() - 1
  long u_min = 0;          // smallest start that can hit
  int imax = -1;           // rows i in [0, imax] can be nonzero
  std::vector<std::vector<double>> K;  // (imax+1)^2, conjugation c = 1
  bool trivial() const { return imax < 0; }
};

HittingKernel build_hitting_kernel(int n, int m0, const std::vector<long>& caps, double conj = 1.0);
// Same kernel assembled from dense integer T-matrix products instead of the probability DP.
HittingKernel build_hitting_kernel_dense(int n, int m0, const std::vector<long>& caps);
double hitting_kernel_entry(int n, double L, double M, const BarrierSpec& g, int i, int j);

FiniteDet stay_below_caps(int n, int m0, const std::vector<long>& caps, double conj = 1.0);
FiniteDet stay_below_prob_finite(int n, const BarrierSpec& g, double L, double M);

struct RescaledPQ {
  int l = 0, m0 = 0;
  long vj = 0, ui = 0;
  double t_eff = 0, zy_eff = 0, L_eff = 0, xxi_eff = 0;
  double P = 0, Q = 0;
};
// P at (t, zeta+y) and Q at (L, x+xi) with lattice arguments rounded; the returned
// effective scaled arguments are the exact preimages of the rounded integers.
RescaledPQ rescaled_PQ(int n, double t, double zeta_plus_y, double L, double x_plus_xi);

struct SteepDescentReport {
  double r = 0;
  std::complex<double> z_plus, z_minus;
  bool complex_pair = false;
  // Candidate radii and whether the descent conditions hold on (0, pi).
  std::vector<double> rho_candidates;
  std::vector<bool> gamma0_steep;
  std::vector<double> R_candidates;
  std::vector<bool> gamma1_Q_positive;
  double suggested_rho0 = 0.4;
  double suggested_rho1 = 0.55;
};
SteepDescentReport contour_advisor(double r);
// Right-hand side of the circle descent condition: (1 + rho^2) / (2 sqrt2 rho).
double steep_rhs(double rho);
double steep_Q(double R, double r, double phi);

}  // namespace aztec
