#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aztec/barrier.hpp"
#include "aztec/continuum.hpp"
#include "aztec/lattice.hpp"
#include "aztec/quadrature.hpp"

namespace aztec {

struct TacnodeOptions {
  int npp = 12;
  double panel = 1.0;
  double xi_max = 0;   // resolvent window on R_+ (0: automatic)
  double window = 0;   // depth of the R_- window (0: automatic)
  double scale = 1;    // multiplies every automatic window
  bool error_estimate = true;
  EngineOptions engine;

  TacnodeOptions doubled_nodes() const;
  TacnodeOptions doubled_window() const;
};

// Phi_t^xi(u) and Psi_t^xi(u) for the hard-edge tacnode at level R.
double tacnode_Phi(double R, double t, double xi, double u);
double tacnode_Psi(double R, double t, double xi, double u);

// (1 - K_0)^{-1} on a Nystrom grid of R_+, with K_0(xi, zeta) = 2^{-1/3} Ai(2^{-1/3}(2R + xi + zeta)).
class TacnodeKernel {
 public:
  // u_reach: largest |u| the kernel will be evaluated at.
  TacnodeKernel(double R, double u_reach, const TacnodeOptions& o = {});

  double R() const { return R_; }
  double condition() const { return cond_; }
  const Rule& xi_rule() const { return xi_; }

  // K^ext(t1, u1_i; t2, u2_j).
  Eigen::MatrixXd ext(double t1, const std::vector<double>& u1, double t2,
                      const std::vector<double>& u2) const;
  double ext(double t1, double u1, double t2, double u2) const;

 private:
  double R_;
  double cond_ = 1;
  Rule xi_;
  Eigen::MatrixXd G_;  // W^{1/2} (I - W^{1/2} K_0 W^{1/2})^{-1} W^{1/2}
};

double tacnode_ext_kernel(double R, double t1, double u1, double t2, double u2,
                          const TacnodeOptions& o = {});
// Same kernel with (1 - K_0)^{-1} replaced by the identity, by direct quadrature.
double tacnode_ext_kernel_no_resolvent(double R, double t1, double u1, double t2, double u2);

// det(1 - K^ext) on the union of {t_l} x [u_l - R, 0].
FredholmResult tacnode_findim(double R, const std::vector<double>& times,
                              const std::vector<double>& levels, const TacnodeOptions& o = {});

// det(1 - (T^0 - T^{g-R}) K_{t2,t1}) on R_-, where g is pinned to R + t^2 outside [t1, t2].
FredholmResult tacnode_continuum(double R, const BarrierSpec& g, const TacnodeOptions& o = {});

// K_g on a Nystrom grid of R_+ (four-term form).
KernelSample kernel_Kg(double R, const BarrierSpec& g, const TacnodeOptions& o = {});
double kernel_Kg_entry(double R, const BarrierSpec& g, double x, double y,
                       const TacnodeOptions& o = {});
// det(1 - K_g) / det(1 - K_R) with K_R the flat kernel.
FredholmResult tacnode_ratio(double R, const BarrierSpec& g, const TacnodeOptions& o = {});

// Largest deviation in the two compatibility relations between Phi, Psi and T^0 on a grid.
struct CompatibilityResidual {
  double phi_side = 0;  // int Phi_{t1}(u) T^0(u, v) du - Phi_{t2}(v)
  double psi_side = 0;  // int T^0(u, v) Psi_{t2}(v) dv - Psi_{t1}(u)
};
CompatibilityResidual compatibility_residual(double R, double t1, double t2,
                                             const std::vector<double>& xis,
                                             const std::vector<double>& us);

// Hitting expectation recursion across t2:
// M_+^{t1} = Ai^{(-t1)}(xi + y) - int T^g Ai^{(-t2)}(. + y) + T^g M_+^{t2}, with g pinned to
// R + t^2 beyond t2. Returns the largest deviation over the given points.
double hitting_recursion_residual(const BarrierSpec& g, double t1, double t2,
                                  const std::vector<double>& xis, const std::vector<double>& ys,
                                  EngineOptions o = {});

}  // namespace aztec
