#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "aztec/lattice.hpp"
#include "aztec/quadrature.hpp"

namespace aztec {

struct EngineOptions {
  double dt_max = 0.25;     // longest slice on pieces where g(t) - t^2 is not linear
  double panel = 1.0;       // panel width as a multiple of sqrt(2 dt)
  double panel_cap = 0.7;   // absolute upper bound on panel width
  int npp = 12;             // Gauss-Legendre nodes per panel
  double lo = -30;          // lower spatial cutoff
  double hi = 15;           // upper cutoff for unconstrained nodes and crossed mass
  double linear_tol = 1e-12;
  double dt_all = 0;        // if positive, no slice of any kind is longer than this

  EngineOptions refined() const;  // halves dt_max and panel widths
};

// Payoff F(t, z) for a list of targets: returns |z| x ny. Must satisfy
// F(s, x) = int phi_{t-s}(x, z) F(t, z) dz, so that hits can be paid at slice ends.
using Payoff = std::function<Eigen::MatrixXd(double t, const std::vector<double>& z)>;

struct HitSlice {
  double t0 = 0, t1 = 0;
  double mass = 0;  // hits in (t0, t1], including the jump at t1
};
struct HittingDensity {
  bool atom = false;  // immediate hit at (alpha, xi)
  std::vector<HitSlice> slices;
  double survival = 0;
  double total() const;
};

// Brownian motion (diffusion coefficient 2) killed above h(t) = g(t) - t^2 on [a, b],
// discretized by time slices with the exact crossing factor of a linear barrier per slice.
class BarrierEngine {
 public:
  BarrierEngine(const BarrierSpec& g, double a, double b, EngineOptions opt = {});

  int slices() const { return static_cast<int>(t_.size()) - 1; }
  const std::vector<double>& times() const { return t_; }
  double cap(int k) const { return cap_[k]; }
  double a() const { return t_.front(); }
  double b() const { return t_.back(); }
  const EngineOptions& options() const { return opt_; }
  // True if some slice approximates a curved g - t^2 by its chord (error O(dt^2)).
  bool curved() const { return curved_; }

  // T^g_{a,b}(xi_i, zeta_j).
  Eigen::MatrixXd transition(const std::vector<double>& xi, const std::vector<double>& zeta) const;
  // E_xi[F(T, X); T <= b], with the immediate atom F(a, xi) for xi above the barrier at a.
  Eigen::MatrixXd hit_values(const std::vector<double>& xi, const Payoff& F) const;
  // Crossed part of a forward-flowing density: given the free flow a(t, z) (|z| x rows), returns
  // (a(b, .) - a(a, .) T^g_{a,b})(eta) as rows x |eta|, tracked without forming the survivors.
  Eigen::MatrixXd crossed_forward(const Payoff& a, const std::vector<double>& eta) const;
  // phi_{b-a}(xi, zeta) - T^g_{a,b}(xi, zeta), without forming the difference.
  Eigen::MatrixXd crossed_transition(const std::vector<double>& xi,
                                     const std::vector<double>& zeta) const;
  HittingDensity hitting_density(double xi) const;

 private:
  struct Node {
    double t = 0, cap = 0;
    Rule below;  // [lo, top]
    Rule above;  // (top, hi], empty when top == hi
  };
  struct Slice {
    double dt = 0;
    bool free = true;
    double hd = 0, ha = 0;  // barrier limits at the two ends
  };
  EngineOptions opt_;
  bool curved_ = false;
  std::vector<double> t_, cap_;
  std::vector<Node> nodes_;
  std::vector<Slice> sl_;

  Eigen::MatrixXd crossed_from(int k0, Eigen::MatrixXd d, const Payoff& a,
                               const std::vector<double>& eta) const;
  // Kernel from points x at node k to the below / above grids of node k+1 (weights folded in).
  void slice_kernels(int k, const std::vector<double>& x, Eigen::MatrixXd* alive,
                     Eigen::MatrixXd* hit_below, Eigen::MatrixXd* hit_above,
                     Eigen::MatrixXd* free_below, Eigen::MatrixXd* free_above) const;
};

}  // namespace aztec
