#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aztec/barrier.hpp"
#include "aztec/lattice.hpp"
#include "aztec/quadrature.hpp"

namespace aztec {

enum class TWKind { GUE, GOE };

// F_GUE(s) = det(1 - K_Ai) on (s, inf); F_GOE(s) = det(1 - K_0) on R_+ with R = 2^{-2/3} s.
FredholmResult tracy_widom(TWKind kind, double s, int npp = 12, double window = 16.0);

struct ContinuumOptions {
  EngineOptions engine;
  double x_max = 0;       // Fredholm window on R_+ (0: automatic)
  double x_panel = 1.5;
  int x_npp = 12;
  double depth = 0;       // spatial depth below the barrier minimum (0: automatic)
  double height = 15;     // extent above the barrier
  double scale = 1;       // multiplies the automatic window and depth
  bool error_estimate = true;

  ContinuumOptions doubled_nodes() const;
  ContinuumOptions doubled_window() const;
};

// Hitting-position expectations on [alpha, M]:
// M_+(xi_i, y_j) = E[Ai^{(-T)}(X + y_j); T <= M] e^{c y_j}.
Eigen::MatrixXd M_plus_matrix(const std::vector<double>& xi, const std::vector<double>& y,
                              double alpha, double M, const BarrierSpec& g, const EngineOptions& o,
                              double c = 0);
// M_-(x_i, xi_m) = E[Ai^{(T)}(X + x_i); T >= L] e^{c x_i}; returned as |xi| x |x|.
Eigen::MatrixXd M_minus_matrix(const std::vector<double>& x, const std::vector<double>& xi,
                               double L, double alpha, const BarrierSpec& g,
                               const EngineOptions& o, double c = 0);
double M_plus(double xi, double y, double alpha, double M, const BarrierSpec& g,
              const EngineOptions& o = {});
double M_minus(double x, double xi, double L, double alpha, const BarrierSpec& g,
               const EngineOptions& o = {});
// Closed forms for g = R + t^2 on the whole line.
double M_plus_flat(double xi, double y, double alpha, double R);
double M_minus_flat(double x, double xi, double alpha, double R);

// The time-reversed barrier t -> g(-t).
BarrierSpec reverse_barrier(const BarrierSpec& g);

struct KernelSample {
  Rule x;             // Nystrom rule on [0, x_max]
  Eigen::MatrixXd K;  // conjugated by e^{-alpha x} ... e^{alpha y}
  double magnitude = 0;  // size of the largest summand, for the rounding floor
};

// Kernel of the hitting-time formula with decomposition time alpha.
KernelSample hitting_kernel(const BarrierSpec& g, double L, double M, double alpha,
                            const ContinuumOptions& o);
// Special case L = alpha = 0 assembled from the split form.
KernelSample hitting_kernel_split_L0(const BarrierSpec& g, double M, const ContinuumOptions& o);

FredholmResult airy2_below_g_hitting(const BarrierSpec& g, double L, double M, double alpha,
                                     const ContinuumOptions& o = {});
FredholmResult airy2_below_g_cqr(const BarrierSpec& g, double L, double M,
                                 const ContinuumOptions& o = {});
// Flat cut-off: the three-term kernel with the closed-form M_+, M_- (whole line).
FredholmResult flat_cut_closed_form(double R, double alpha = 0, int npp = 12,
                                    double window_scale = 1);

// Lemma-type identity on the heat flow: |int Ai^{(s)}(x+u) phi_{t-s}(u,y) du - Ai^{(t)}(x+y)|.
double heat_identity_residual(double s, double t, double x, double y);

// T^g_{t1,t2}(xi, zeta), refined until two successive levels agree to tol.
double barrier_transition(const BarrierSpec& g, double t1, double t2, double xi, double zeta,
                          double tol = 1e-8, EngineOptions o = {});
HittingDensity hitting_density(double xi, double alpha, const BarrierSpec& g, double M,
                               EngineOptions o = {});
// First-passage time density of the level R from xi < R started at alpha.
double flat_hitting_time_density(double xi, double alpha, double R, double t);

// Monte Carlo estimate of P(b stays below h on [t1, t2], b(t2) <= z | b(t1) = xi) for a
// barrier whose g(t) - t^2 is piecewise linear between the given knots.
struct McEstimate {
  double p = 0, se = 0;
  long paths = 0;
};
McEstimate mc_barrier_cdf(const BarrierSpec& g, double t1, double t2, double xi, double z,
                          long paths, std::uint64_t seed, int steps_per_unit = 8);
// Same probability from the slicing engine.
double engine_barrier_cdf(const BarrierSpec& g, double t1, double t2, double xi, double z,
                          EngineOptions o = {});

}  // namespace aztec
