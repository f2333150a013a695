#include "aztec/tacnode.hpp"

#include <algorithm>
#include <cmath>

#include "aztec/airy.hpp"

namespace aztec {

namespace {

Eigen::Map<const Eigen::VectorXd> wv(const Rule& r) {
  return Eigen::Map<const Eigen::VectorXd>(r.w.data(), static_cast<Eigen::Index>(r.w.size()));
}

// g - R, pinned to t^2 outside [t1, t2].
BarrierSpec shifted(const BarrierSpec& g, double R) {
  BarrierSpec s;
  for (const auto& p : g.pieces) {
    auto f = p.g;
    s.pieces.push_back({p.a, p.b, [f, R](double t) { return f(t) - R; }});
  }
  s.pinned = g.pinned;
  s.R = g.R - R;
  s.t1 = g.t1;
  s.t2 = g.t2;
  return s;
}

void check_pinned(const BarrierSpec& g) {
  if (!g.pinned || !(g.t1 < g.t2)) throw DomainError("tacnode barrier must be pinned with t1 < t2");
}

double min_h(const BarrierSpec& gs, double t1, double t2) {
  double m = 0;
  for (int i = 0; i <= 400; ++i) {
    const double t = t1 + (t2 - t1) * i / 400.0;
    const double v = gs.value(t);
    if (std::isfinite(v)) m = std::min(m, v - t * t);
  }
  for (double b : gs.breakpoints())
    if (b >= t1 && b <= t2 && std::isfinite(gs.value(b))) m = std::min(m, gs.value(b) - b * b);
  return m;
}

double window_depth(const BarrierSpec& gs, double t1, double t2, const TacnodeOptions& o) {
  if (o.window > 0) return o.window;
  return o.scale * (-min_h(gs, t1, t2) + 10 * std::sqrt(2 * (t2 - t1)) + 8);
}

std::vector<double> caps_in(const BarrierSpec& gs, double lo, double hi) {
  std::vector<double> br;
  for (double t : {gs.t1, gs.t2}) {
    const double c = gs.value(t) - t * t;
    if (std::isfinite(c) && c > lo && c < hi) br.push_back(c);
  }
  return br;
}

}  // namespace

TacnodeOptions TacnodeOptions::doubled_nodes() const {
  TacnodeOptions c = *this;
  c.npp *= 2;
  c.engine.npp *= 2;
  c.engine.dt_max *= 0.5;
  return c;
}

TacnodeOptions TacnodeOptions::doubled_window() const {
  TacnodeOptions c = *this;
  c.xi_max = 2 * xi_max;
  c.window = 2 * window;
  c.scale *= 2;
  return c;
}

double tacnode_Phi(double R, double t, double xi, double u) {
  return tilted_airy(t, R + xi + u) - tilted_airy(t, R + xi - u);
}

double tacnode_Psi(double R, double t, double xi, double u) {
  return tilted_airy(-t, R + xi + u) - tilted_airy(-t, R + xi - u);
}

TacnodeKernel::TacnodeKernel(double R, double u_reach, const TacnodeOptions& o) : R_(R) {
  const double X = o.xi_max > 0 ? o.xi_max
                                 : o.scale * (std::max(14.0 - R, 0.0) + std::max(0.0, u_reach) + 2);
  xi_ = composite(0, std::max(X, 1.0), o.panel, o.npp);
  const Eigen::Index n = static_cast<Eigen::Index>(xi_.size());
  const double c = std::pow(2.0, -1.0 / 3);
  Eigen::VectorXd s = wv(xi_).cwiseSqrt();
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      S(i, j) = s[i] * c * airy_ai(c * (2 * R + xi_.x[i] + xi_.x[j])) * s[j];
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - S;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) throw ConvergenceError("1 - K_0 is numerically singular");
  cond_ = 1 / rc;
  G_ = s.asDiagonal() * lu.inverse() * s.asDiagonal();
}

Eigen::MatrixXd TacnodeKernel::ext(double t1, const std::vector<double>& u1, double t2,
                                   const std::vector<double>& u2) const {
  const std::size_t m = xi_.size();
  Eigen::MatrixXd P(u1.size(), m), F(m, u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i)
    for (std::size_t k = 0; k < m; ++k) P(i, k) = tacnode_Psi(R_, t1, xi_.x[k], u1[i]);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < u2.size(); ++j) F(k, j) = tacnode_Phi(R_, t2, xi_.x[k], u2[j]);
  Eigen::MatrixXd K = P * G_ * F;
  if (t1 < t2)
    for (std::size_t i = 0; i < u1.size(); ++i)
      for (std::size_t j = 0; j < u2.size(); ++j) K(i, j) -= reflection_T(t2 - t1, u1[i], u2[j], 0.0);
  return K;
}

double TacnodeKernel::ext(double t1, double u1, double t2, double u2) const {
  return ext(t1, std::vector<double>{u1}, t2, std::vector<double>{u2})(0, 0);
}

double tacnode_ext_kernel(double R, double t1, double u1, double t2, double u2,
                          const TacnodeOptions& o) {
  if (u1 > 0 || u2 > 0) throw DomainError("tacnode kernel needs u1, u2 <= 0");
  return TacnodeKernel(R, std::max(-u1, -u2), o).ext(t1, u1, t2, u2);
}

double tacnode_ext_kernel_no_resolvent(double R, double t1, double u1, double t2, double u2) {
  if (u1 > 0 || u2 > 0) throw DomainError("tacnode kernel needs u1, u2 <= 0");
  const double X = std::max(14.0 - R, 0.0) + std::max(-u1, -u2) + 6;
  Rule r = composite(0, X, 0.25, 20);
  double acc = 0;
  for (std::size_t k = 0; k < r.size(); ++k)
    acc += r.w[k] * tacnode_Psi(R, t1, r.x[k], u1) * tacnode_Phi(R, t2, r.x[k], u2);
  if (t1 < t2) acc -= reflection_T(t2 - t1, u1, u2, 0.0);
  return acc;
}

FredholmResult tacnode_findim(double R, const std::vector<double>& times,
                              const std::vector<double>& levels, const TacnodeOptions& o) {
  if (times.size() != levels.size() || times.empty())
    throw DomainError("tacnode_findim needs matching nonempty times and levels");
  for (double u : levels)
    if (u > R) throw DomainError("tacnode_findim needs levels u <= R");
  int nodes = 0;
  double xm = 0;
  auto run = [&](const TacnodeOptions& op) {
    double reach = 0;
    for (double u : levels) reach = std::max(reach, R - u);
    TacnodeKernel tk(R, reach, op);
    std::vector<Rule> rules;
    std::size_t total = 0;
    for (double u : levels) {
      rules.push_back(u < R ? composite(u - R, 0, op.panel, op.npp) : Rule{});
      total += rules.back().size();
    }
    if (!nodes) {
      nodes = static_cast<int>(total);
      xm = tk.xi_rule().x.back();
    }
    if (total == 0) return 1.0;
    Eigen::MatrixXd K(total, total);
    Rule all;
    std::size_t ri = 0;
    for (std::size_t a = 0; a < times.size(); ++a) {
      std::size_t ci = 0;
      for (std::size_t b = 0; b < times.size(); ++b) {
        if (rules[a].size() && rules[b].size())
          K.block(ri, ci, rules[a].size(), rules[b].size()) =
              tk.ext(times[a], rules[a].x, times[b], rules[b].x);
        ci += rules[b].size();
      }
      ri += rules[a].size();
      all.append(rules[a]);
    }
    return nystrom_det(K, all);
  };
  const double v = run(o);
  double err = 0;
  if (o.error_estimate) {
    TacnodeOptions c = o;
    c.npp = std::max(6, o.npp - 4);
    err = 3 * std::abs(v - run(c));
  }
  return finalize(v, std::max(err, 1e-13), nodes, xm, "tacnode-findim");
}

FredholmResult tacnode_continuum(double R, const BarrierSpec& g, const TacnodeOptions& o) {
  check_pinned(g);
  const double t1 = g.t1, t2 = g.t2;
  BarrierSpec gs = shifted(g, R);
  int nodes = 0;
  double xm = 0;
  auto run = [&](const TacnodeOptions& op) {
    const double W = window_depth(gs, t1, t2, op);
    Rule ur = composite(-W, 0, std::min(op.panel, 0.5), op.npp, caps_in(gs, -W, 0));
    EngineOptions eo = op.engine;
    eo.lo = -W - 10 * std::sqrt(2 * (t2 - t1)) - 5;
    eo.hi = std::max(eo.hi, 5.0);
    const auto& u = ur.x;
    // T^0 - T^g as (phi - T^g) - (phi - T^0); both parts are small far below the barrier.
    Eigen::MatrixXd D = BarrierEngine(gs, t1, t2, eo).crossed_transition(u, u);
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j) D(i, j) -= phi(t2 - t1, 0.0, u[i] + u[j]);
    TacnodeKernel tk(R, W, op);
    if (!nodes) {
      nodes = static_cast<int>(u.size());
      xm = W;
    }
    Eigen::MatrixXd K = tk.ext(t2, u, t1, u);
    auto Wd = wv(ur).asDiagonal();
    Eigen::VectorXd s = wv(ur).cwiseSqrt();
    Eigen::MatrixXd A = s.asDiagonal() * D * Wd * K * s.asDiagonal();
    // K grows like e^{tau |v|} in its second argument; a diagonal similarity keeps LU balanced.
    const double tau = std::max(std::abs(t1), std::abs(t2));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) *= std::exp(tau * (u[j] - u[i]));
    return det_one_minus(A);
  };
  const double v = run(o);
  double err = 0;
  if (o.error_estimate) {
    TacnodeOptions c = o;
    c.npp = std::max(6, o.npp - 4);
    c.engine.npp = std::max(6, o.engine.npp - 4);
    c.window = 0.8 * window_depth(gs, t1, t2, o);
    err = 3 * std::abs(v - run(c));
  }
  return finalize(v, std::max(err, 1e-13), nodes, xm, "tacnode-continuum");
}

KernelSample kernel_Kg(double R, const BarrierSpec& g, const TacnodeOptions& o) {
  check_pinned(g);
  const double t1 = g.t1, t2 = g.t2, T = t2 - t1;
  BarrierSpec gs = shifted(g, R);
  KernelSample ks;
  ks.x = composite(0, o.scale * std::max(1.0, 14 + std::max(0.0, -2 * R)), 1.0, o.npp);
  const auto& xs = ks.x.x;
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());

  // Term with phi - T^{g-R}: hitting expectations of Ai^{(-t)}(. + R + y).
  const double grow = std::max(0.0, -t1);
  const double depth = o.scale * std::max(20.0, 2 * T * (grow + std::sqrt(grow * grow + 40 / T)));
  const double hmin = min_h(gs, t1, t2);
  const double lo = hmin - depth;
  EngineOptions eo = o.engine;
  eo.lo = lo - 5;
  eo.hi = std::max(eo.hi, 15.0);
  if (eo.dt_all <= 0) eo.dt_all = eo.dt_max;
  const double cap1 = gs.value(t1) - t1 * t1;
  std::vector<double> br;
  if (std::isfinite(cap1) && cap1 > lo && cap1 < 15) br.push_back(cap1);
  Rule xr = composite(lo, 15, 0.5, o.engine.npp, br);
  Payoff F = [&](double t, const std::vector<double>& z) {
    Eigen::MatrixXd M(z.size(), xs.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = 0; j < xs.size(); ++j) M(i, j) = tilted_airy(-t, z[i] + R + xs[j]);
    return M;
  };
  Eigen::MatrixXd H = BarrierEngine(gs, t1, t2, eo).hit_values(xr.x, F);
  Eigen::MatrixXd A1(n, xr.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t m = 0; m < xr.size(); ++m) A1(i, m) = tilted_airy(t1, R + xs[i] + xr.x[m]);
  ks.K = A1 * wv(xr).asDiagonal() * H;
  ks.magnitude = (A1.cwiseAbs() * wv(xr).asDiagonal() * H.cwiseAbs()).maxCoeff();

  // Terms with T^{g-R} on R_- x R_-.
  const double W = (o.window > 0 ? o.window : 25 * o.scale) + 4 * std::sqrt(2 * T);
  Rule ur = composite(-W, 0, 0.5, o.engine.npp, caps_in(gs, -W, 0));
  const auto& u = ur.x;
  EngineOptions e2 = o.engine;
  e2.lo = -W - 10 * std::sqrt(2 * T) - 5;
  Eigen::MatrixXd Tg = BarrierEngine(gs, t1, t2, e2).transition(u, u);
  Eigen::MatrixXd a(n, u.size()), ab(n, u.size()), b(u.size(), n), bb(u.size(), n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t m = 0; m < u.size(); ++m) {
      a(i, m) = tilted_airy(t1, R + xs[i] + u[m]);
      ab(i, m) = tilted_airy(t1, R + xs[i] - u[m]);
      b(m, i) = tilted_airy(-t2, R + xs[i] - u[m]);
      bb(m, i) = tilted_airy(-t2, R + xs[i] + u[m]);
    }
  auto Wd = wv(ur).asDiagonal();
  Eigen::MatrixXd TW = Wd * Tg * Wd;
  ks.K += a * TW * b + ab * TW * bb - ab * TW * b;
  return ks;
}

double kernel_Kg_entry(double R, const BarrierSpec& g, double x, double y, const TacnodeOptions& o) {
  KernelSample ks = kernel_Kg(R, g, o);
  // Only grid nodes; no interpolation.
  auto idx = [&](double v) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < ks.x.size(); ++i)
      if (std::abs(ks.x.x[i] - v) < std::abs(ks.x.x[best] - v)) best = i;
    return best;
  };
  const std::size_t i = idx(x), j = idx(y);
  if (std::abs(ks.x.x[i] - x) > 1e-12 || std::abs(ks.x.x[j] - y) > 1e-12)
    throw DomainError("kernel_Kg_entry: point is not a grid node");
  return ks.K(i, j);
}

FredholmResult tacnode_ratio(double R, const BarrierSpec& g, const TacnodeOptions& o) {
  int nodes = 0;
  double xm = 0;
  auto run = [&](const TacnodeOptions& op) {
    KernelSample ks = kernel_Kg(R, g, op);
    if (!nodes) {
      nodes = static_cast<int>(ks.x.size());
      xm = ks.x.x.back();
    }
    const double c = std::pow(2.0, -1.0 / 3);
    KernelFn kr = [&](double x, double y) { return c * airy_ai(c * (2 * R + x + y)); };
    return nystrom_det(ks.K, ks.x) / nystrom_det(sample_kernel(kr, ks.x), ks.x);
  };
  const double v = run(o);
  double err = 0;
  if (o.error_estimate) {
    TacnodeOptions c = o;
    c.npp = std::max(6, o.npp - 4);
    c.engine.npp = std::max(6, o.engine.npp - 4);
    err = 3 * std::abs(v - run(c));
  }
  return finalize(v, std::max(err, 1e-13), nodes, xm, "tacnode-ratio");
}

CompatibilityResidual compatibility_residual(double R, double t1, double t2,
                                             const std::vector<double>& xis,
                                             const std::vector<double>& us) {
  if (!(t1 < t2)) throw DomainError("compatibility needs t1 < t2");
  CompatibilityResidual res;
  const double sig = std::sqrt(2 * (t2 - t1));
  const double shift = 2 * std::max(std::abs(t1), std::abs(t2)) * (t2 - t1);
  for (double v : us) {
    Rule r = composite(v - shift - 16 * sig, 0, 0.25 * sig, 16);
    for (double xi : xis) {
      double a = 0, b = 0;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double T = reflection_T(t2 - t1, r.x[k], v, 0.0);
        a += r.w[k] * tacnode_Phi(R, t1, xi, r.x[k]) * T;
        b += r.w[k] * reflection_T(t2 - t1, v, r.x[k], 0.0) * tacnode_Psi(R, t2, xi, r.x[k]);
      }
      res.phi_side = std::max(res.phi_side, std::abs(a - tacnode_Phi(R, t2, xi, v)));
      res.psi_side = std::max(res.psi_side, std::abs(b - tacnode_Psi(R, t1, xi, v)));
    }
  }
  return res;
}

double hitting_recursion_residual(const BarrierSpec& g, double t1, double t2,
                                  const std::vector<double>& xis, const std::vector<double>& ys,
                                  EngineOptions o) {
  check_pinned(g);
  const double R = g.R;
  const double tail = t2 + 3;
  // Left side: hits on [t1, tail]; later hits carry Ai^{(-t)} with t > tail and are negligible.
  Payoff F = [&](double t, const std::vector<double>& z) {
    Eigen::MatrixXd M(z.size(), ys.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) M(i, j) = tilted_airy(-t, z[i] + ys[j]);
    return M;
  };
  if (o.dt_all <= 0) o.dt_all = o.dt_max;
  o.lo = std::min(o.lo, *std::min_element(xis.begin(), xis.end()) - 25);
  Eigen::MatrixXd lhs = BarrierEngine(g, t1, tail, o).hit_values(xis, F);
  BarrierEngine e(g, t1, t2, o);
  const double cap2 = e.cap(e.slices());
  Rule zr = composite(o.lo, cap2, 0.25, 16);
  Eigen::MatrixXd T = e.transition(xis, zr.x);
  double worst = 0;
  for (std::size_t i = 0; i < xis.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      double rhs = xis[i] <= e.cap(0) ? tilted_airy(-t1, xis[i] + ys[j]) : lhs(i, j);
      if (xis[i] <= e.cap(0))
        for (std::size_t k = 0; k < zr.size(); ++k) {
          const double z = zr.x[k];
          const double mplus = z < R ? tilted_airy(-t2, 2 * R + ys[j] - z) : tilted_airy(-t2, z + ys[j]);
          rhs += zr.w[k] * T(i, k) * (mplus - tilted_airy(-t2, z + ys[j]));
        }
      worst = std::max(worst, std::abs(lhs(i, j) - rhs));
    }
  return worst;
}

}  // namespace aztec
