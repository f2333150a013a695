#include "aztec/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "aztec/airy.hpp"
#include "aztec/sampler.hpp"

namespace aztec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Map<const Eigen::VectorXd> wv(const Rule& r) {
  return Eigen::Map<const Eigen::VectorXd>(r.w.data(), static_cast<Eigen::Index>(r.w.size()));
}

struct Profile {
  double hmin = kInf, hmax = -kInf, gmin = kInf;
  bool any = false;
};

Profile profile(const BarrierSpec& g, double L, double M) {
  Profile p;
  std::vector<double> ts;
  const int n = 600;
  for (int i = 0; i <= n; ++i) ts.push_back(L + (M - L) * i / n);
  for (double b : g.breakpoints())
    if (b >= L && b <= M) ts.push_back(b);
  if (g.pinned) {
    for (double b : {g.t1, g.t2})
      if (b >= L && b <= M) ts.push_back(b);
  }
  for (double t : ts) {
    const double v = g.value(t);
    if (!std::isfinite(v)) continue;
    p.any = true;
    p.gmin = std::min(p.gmin, v);
    p.hmin = std::min(p.hmin, v - t * t);
    p.hmax = std::max(p.hmax, v - t * t);
  }
  return p;
}

// Rough log |Ai^{(-t)}(h)|.
double log_tilted(double t, double h) {
  const double s = -t, arg = s * s + h;
  double la;
  if (arg >= 0)
    la = log_airy_ai(arg);
  else
    la = std::log(0.6 / std::pow(1 + std::abs(arg), 0.25));
  return 2 * s * s * s / 3 + h * s + la;
}

// Depth a below the barrier minimum after which hits started at time t_lo, weighted by a factor
// growing like e^{growth a}, are below double precision.
double auto_depth(double growth, double t_lo, double t_hi, double hmin) {
  const double T = t_hi - t_lo;
  if (T <= 0) return 20;
  const double ref = log_tilted(t_lo, hmin);
  for (double a = 20; a < 400; a += 1) {
    double best = -kInf;
    for (int i = 1; i <= 60; ++i) {
      const double dt = T * i / 60.0;
      best = std::max(best, -a * a / (4 * dt) + log_tilted(t_lo + dt, hmin));
    }
    if (growth * (a + std::max(0.0, -hmin)) + best - std::min(ref, 0.0) < -38) return a;
  }
  return 400;
}

struct Resolved {
  double lo_xi = 0, hi_xi = 0, x_max = 0;
  EngineOptions eo;
  bool trivial = false;
};

Resolved resolve(const BarrierSpec& g, double L, double M, double alpha, const ContinuumOptions& o) {
  Resolved r;
  Profile p = profile(g, L, M);
  if (!p.any) {
    r.trivial = true;
    return r;
  }
  double depth = o.depth;
  if (depth <= 0) {
    depth = o.scale * std::max(auto_depth(std::max(0.0, -alpha), alpha, M, p.hmin),
                               auto_depth(std::max(0.0, alpha), -alpha, -L, p.hmin));
  }
  r.lo_xi = p.hmin - depth;
  r.hi_xi = std::max(p.hmin, 0.0) + o.height;
  r.x_max = o.x_max > 0 ? o.x_max : o.scale * std::min(40.0, 14 + std::max(0.0, -p.gmin));
  r.eo = o.engine;
  r.eo.lo = r.lo_xi - 5;
  r.eo.hi = std::min(std::max(p.hmax, 0.0), p.hmin + 45) + o.height;
  // Long slices let the tilted payoff reach far below the grid.
  if (r.eo.dt_all <= 0) r.eo.dt_all = r.eo.dt_max;
  return r;
}

Payoff airy_payoff(const std::vector<double>& y, double c, double sign) {
  // F(t, z)(i, j) = Ai^{(sign * t)}(z_i + y_j) e^{c y_j}
  return [y, c, sign](double t, const std::vector<double>& z) {
    Eigen::MatrixXd F(z.size(), y.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) F(i, j) = tilted_airy(sign * t, z[i] + y[j], c * y[j]);
    return F;
  };
}

Eigen::MatrixXd airy_block(const std::vector<double>& a, const std::vector<double>& b, double s,
                           double c) {
  // (i, j) -> Ai^{(s)}(a_i + b_j) e^{c b_j}
  Eigen::MatrixXd M(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) M(i, j) = tilted_airy(s, a[i] + b[j], c * b[j]);
  return M;
}

ContinuumOptions coarsened(const ContinuumOptions& o, const Resolved& r, double hmin) {
  ContinuumOptions c = o;
  c.engine.npp = std::max(6, o.engine.npp - 4);
  c.x_npp = std::max(6, o.x_npp - 4);
  c.depth = 0.8 * (hmin - r.lo_xi);
  c.x_max = 0.8 * r.x_max;
  c.height = 0.8 * o.height;
  c.error_estimate = false;
  return c;
}

FredholmResult with_estimate(const std::function<KernelSample(const ContinuumOptions&)>& build,
                             const BarrierSpec& g, double L, double M, double alpha,
                             const ContinuumOptions& o, const std::string& route) {
  Resolved r = resolve(g, L, M, alpha, o);
  if (r.trivial) return finalize(1.0, 0.0, 0, 0, route);
  KernelSample ks = build(o);
  const double base = nystrom_det(ks.K, ks.x);
  double raw = base, err = 0;
  if (BarrierEngine(g, L, M, r.eo).curved()) {
    // Chord crossing factors leave an O(dt^2) error: one Richardson step in dt.
    ContinuumOptions h = o;
    h.engine.dt_max *= 0.5;
    if (h.engine.dt_all > 0) h.engine.dt_all *= 0.5;
    KernelSample kh = build(h);
    const double half = nystrom_det(kh.K, kh.x);
    raw = half + (half - base) / 3;
    err = std::abs(half - base);
  }
  if (o.error_estimate) {
    const double hmin = profile(g, L, M).hmin;
    KernelSample kc = build(coarsened(o, r, hmin));
    err = std::max(err, 3 * std::abs(base - nystrom_det(kc.K, kc.x)));
  }
  err = std::max(err, 1e-14 * std::max(1.0, ks.magnitude));
  FredholmResult res = finalize(raw, err, static_cast<int>(ks.x.size()), r.x_max, route);
  return res;
}

}  // namespace

ContinuumOptions ContinuumOptions::doubled_nodes() const {
  ContinuumOptions c = *this;
  c.engine.npp *= 2;
  c.x_npp *= 2;
  c.engine.dt_max *= 0.5;
  if (c.engine.dt_all > 0) c.engine.dt_all *= 0.5;
  return c;
}

ContinuumOptions ContinuumOptions::doubled_window() const {
  ContinuumOptions c = *this;
  c.x_max = x_max > 0 ? 2 * x_max : 0;
  c.height = 2 * height;
  c.depth = depth > 0 ? 2 * depth : 0;
  c.scale = 2 * scale;
  return c;
}

FredholmResult tracy_widom(TWKind kind, double s, int npp, double window) {
  auto run = [&](int n, double W) {
    if (kind == TWKind::GUE) {
      Rule r = composite(s, s + W, 1.0, n);
      std::vector<double> a(r.size()), ap(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        a[i] = airy_ai(r.x[i]);
        ap[i] = airy_ai_prime(r.x[i]);
      }
      Eigen::MatrixXd K(r.size(), r.size());
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j) {
          const double d = r.x[i] - r.x[j];
          K(i, j) = std::abs(d) < 1e-9 ? ap[i] * ap[i] - r.x[i] * a[i] * a[i]
                                       : (a[i] * ap[j] - ap[i] * a[j]) / d;
        }
      return nystrom_det(K, r);
    }
    const double R = std::pow(2.0, -2.0 / 3) * s, c = std::pow(2.0, -1.0 / 3);
    Rule r = composite(0, W + std::max(0.0, -R), 1.0, n);
    KernelFn k = [&](double x, double y) { return c * airy_ai(c * (2 * R + x + y)); };
    return nystrom_det(sample_kernel(k, r), r);
  };
  const double v = run(npp, window);
  const double coarse = run(std::max(4, npp * 2 / 3), 0.75 * window);
  const double err = 3 * std::abs(v - coarse) + 1e-14;
  return finalize(v, err, 0, window, kind == TWKind::GUE ? "airy-kernel" : "flat-kernel");
}

BarrierSpec reverse_barrier(const BarrierSpec& g) {
  BarrierSpec r;
  for (const auto& p : g.pieces) {
    auto f = p.g;
    r.pieces.push_back({-p.b, -p.a, [f](double s) { return f(-s); }});
  }
  r.pinned = g.pinned;
  r.R = g.R;
  r.t1 = -g.t2;
  r.t2 = -g.t1;
  return r;
}

Eigen::MatrixXd M_plus_matrix(const std::vector<double>& xi, const std::vector<double>& y,
                              double alpha, double M, const BarrierSpec& g, const EngineOptions& o,
                              double c) {
  Payoff F = airy_payoff(y, c, -1.0);
  if (alpha >= M) {
    const double cap = g.value(alpha) - alpha * alpha;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(xi.size(), y.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
      if (xi[i] > cap) out.row(i) = F(alpha, {xi[i]});
    return out;
  }
  BarrierEngine e(g, alpha, M, o);
  return e.hit_values(xi, F);
}

Eigen::MatrixXd M_minus_matrix(const std::vector<double>& x, const std::vector<double>& xi,
                               double L, double alpha, const BarrierSpec& g,
                               const EngineOptions& o, double c) {
  // Reversed time s = -t: E[Ai^{(-S)}(X + x); S <= -L] from (-alpha, xi).
  return M_plus_matrix(xi, x, -alpha, -L, reverse_barrier(g), o, c);
}

double M_plus(double xi, double y, double alpha, double M, const BarrierSpec& g,
              const EngineOptions& o) {
  return M_plus_matrix({xi}, {y}, alpha, M, g, o)(0, 0);
}

double M_minus(double x, double xi, double L, double alpha, const BarrierSpec& g,
               const EngineOptions& o) {
  return M_minus_matrix({x}, {xi}, L, alpha, g, o)(0, 0);
}

double M_plus_flat(double xi, double y, double alpha, double R) {
  return xi >= R ? tilted_airy(-alpha, xi + y) : tilted_airy(-alpha, 2 * R - xi + y);
}

double M_minus_flat(double x, double xi, double alpha, double R) {
  return xi >= R ? tilted_airy(alpha, xi + x) : tilted_airy(alpha, 2 * R - xi + x);
}

KernelSample hitting_kernel(const BarrierSpec& g, double L, double M, double alpha,
                            const ContinuumOptions& o) {
  if (!(L <= alpha && alpha <= M && L < M)) throw DomainError("hitting kernel needs L <= alpha <= M");
  Resolved r = resolve(g, L, M, alpha, o);
  KernelSample ks;
  ks.x = composite(0, r.trivial ? 1.0 : r.x_max, o.x_panel, o.x_npp);
  const auto& xs = ks.x.x;
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  ks.K = Eigen::MatrixXd::Zero(n, n);
  if (r.trivial) return ks;
  const double cap = g.value(alpha) - alpha * alpha;
  std::vector<double> br;
  if (std::isfinite(cap) && cap > r.lo_xi && cap < r.hi_xi) br.push_back(cap);
  Rule xr = composite(r.lo_xi, r.hi_xi, std::min(0.5, o.engine.panel_cap), o.engine.npp, br);
  const auto& xi = xr.x;

  Eigen::MatrixXd Mp = M_plus_matrix(xi, xs, alpha, M, g, r.eo, alpha);      // |xi| x n
  Eigen::MatrixXd Mm = M_minus_matrix(xs, xi, L, alpha, g, r.eo, -alpha);    // |xi| x n
  Eigen::MatrixXd Ap = airy_block(xs, xi, alpha, 0.0);                       // n x |xi|
  for (Eigen::Index i = 0; i < n; ++i) Ap.row(i) *= std::exp(-alpha * xs[i]);
  Eigen::MatrixXd Am = airy_block(xi, xs, -alpha, alpha);                    // |xi| x n
  auto W = wv(xr).asDiagonal();
  Eigen::MatrixXd MmT = Mm.transpose();
  ks.K = MmT * W * Am + Ap * W * Mp - MmT * W * Mp;
  Eigen::MatrixXd mag = MmT.cwiseAbs() * W * Am.cwiseAbs() + Ap.cwiseAbs() * W * Mp.cwiseAbs() +
                        MmT.cwiseAbs() * W * Mp.cwiseAbs();
  ks.magnitude = mag.maxCoeff();
  return ks;
}

KernelSample hitting_kernel_split_L0(const BarrierSpec& g, double M, const ContinuumOptions& o) {
  Resolved r = resolve(g, 0, M, 0, o);
  KernelSample ks;
  ks.x = composite(0, r.trivial ? 1.0 : r.x_max, o.x_panel, o.x_npp);
  const auto& xs = ks.x.x;
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  ks.K = Eigen::MatrixXd::Zero(n, n);
  if (r.trivial) return ks;
  const double c0 = g.value(0);
  // Airy kernel part from xi > g(0).
  if (std::isfinite(c0)) {
    std::vector<double> a(n), ap(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a[i] = airy_ai(xs[i] + c0);
      ap[i] = airy_ai_prime(xs[i] + c0);
    }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = xs[i] - xs[j];
        ks.K(i, j) = std::abs(d) < 1e-9 ? ap[i] * ap[i] - (xs[i] + c0) * a[i] * a[i]
                                        : (a[i] * ap[j] - ap[i] * a[j]) / d;
      }
  }
  const double top = std::isfinite(c0) ? std::min(c0, r.hi_xi) : r.hi_xi;
  if (top > r.lo_xi) {
    Rule xr = composite(r.lo_xi, top, std::min(0.5, o.engine.panel_cap), o.engine.npp);
    Eigen::MatrixXd Mp = M_plus_matrix(xr.x, xs, 0, M, g, r.eo, 0);
    Eigen::MatrixXd A = airy_block(xs, xr.x, 0, 0);
    ks.K += A * wv(xr).asDiagonal() * Mp;
    ks.magnitude = (A.cwiseAbs() * wv(xr).asDiagonal() * Mp.cwiseAbs()).maxCoeff();
  }
  ks.magnitude = std::max(ks.magnitude, ks.K.cwiseAbs().maxCoeff());
  return ks;
}

FredholmResult airy2_below_g_hitting(const BarrierSpec& g, double L, double M, double alpha,
                                     const ContinuumOptions& o) {
  auto build = [&](const ContinuumOptions& c) { return hitting_kernel(g, L, M, alpha, c); };
  FredholmResult r = with_estimate(build, g, L, M, alpha, o, "hitting");
  return r;
}

namespace {

// Split at tau = clamp(0, L, M). With a(t, .) = Ai^{(t)}(x + .) and f(t, .) = Ai^{(-t)}(. + y),
// C = phi - T^g gives d = a(tau) - a(L) T^g_{L,tau} and e = f(tau) - T^g_{tau,M} f(M), and
// K = int [a(tau) e + d f(tau) - d e] d eta.
KernelSample cqr_kernel(const BarrierSpec& g, double L, double M, const ContinuumOptions& o) {
  const double tau = std::clamp(0.0, L, M);
  Resolved r = resolve(g, L, M, tau, o);
  KernelSample ks;
  ks.x = composite(0, r.trivial ? 1.0 : r.x_max, o.x_panel, o.x_npp);
  const auto& xs = ks.x.x;
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  ks.K = Eigen::MatrixXd::Zero(n, n);
  if (r.trivial) return ks;
  const double capL = g.value(L) - L * L, capT = g.value(tau) - tau * tau;
  std::vector<double> br;
  if (std::isfinite(capT) && capT > r.lo_xi && capT < r.hi_xi) br.push_back(capT);
  Rule er = composite(r.lo_xi, r.hi_xi, std::min(0.5, o.engine.panel_cap), o.engine.npp, br);
  const auto& eta = er.x;
  Eigen::MatrixXd a0 = airy_block(xs, eta, tau, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) a0.row(i) *= std::exp(-tau * xs[i]);
  Eigen::MatrixXd f0 = airy_block(eta, xs, -tau, tau);

  Eigen::MatrixXd d;  // n x |eta|
  if (tau > L) {
    Payoff a = [&](double t, const std::vector<double>& z) {
      Eigen::MatrixXd G(z.size(), n);
      for (std::size_t i = 0; i < z.size(); ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = tilted_airy(t, xs[j] + z[i], -tau * xs[j]);
      return G;
    };
    d = BarrierEngine(g, L, tau, r.eo).crossed_forward(a, eta);
  } else {
    d = Eigen::MatrixXd::Zero(n, eta.size());
    for (std::size_t m = 0; m < eta.size(); ++m)
      if (eta[m] > capL) d.col(m) = a0.col(m);
  }
  Eigen::MatrixXd e;  // |eta| x n
  if (M > tau) {
    e = BarrierEngine(g, tau, M, r.eo).hit_values(eta, airy_payoff(xs, tau, -1.0));
  } else {
    e = Eigen::MatrixXd::Zero(eta.size(), n);
    for (std::size_t m = 0; m < eta.size(); ++m)
      if (eta[m] > capT) e.row(m) = f0.row(m);
  }
  auto W = wv(er).asDiagonal();
  ks.K = a0 * W * e + d * W * f0 - d * W * e;
  ks.magnitude = (a0.cwiseAbs() * W * e.cwiseAbs() + d.cwiseAbs() * W * f0.cwiseAbs() +
                  d.cwiseAbs() * W * e.cwiseAbs())
                     .maxCoeff();
  return ks;
}

}  // namespace

FredholmResult airy2_below_g_cqr(const BarrierSpec& g, double L, double M,
                                 const ContinuumOptions& o) {
  if (!(L < M)) throw DomainError("cqr needs L < M");
  auto build = [&](const ContinuumOptions& c) { return cqr_kernel(g, L, M, c); };
  return with_estimate(build, g, L, M, std::clamp(0.0, L, M), o, "cqr");
}

FredholmResult flat_cut_closed_form(double R, double alpha, int npp, double window_scale) {
  auto run = [&](int n, double X, double D) {
    Rule xr = composite(0, X, 1.0, n);
    Rule xir = composite(R - D, R + 16, 0.5, n, {R});
    const auto& xs = xr.x;
    const auto& xi = xir.x;
    Eigen::MatrixXd Mp(xi.size(), xs.size()), Mm(xi.size(), xs.size()), Am(xi.size(), xs.size());
    Eigen::MatrixXd Ap(xs.size(), xi.size());
    for (std::size_t m = 0; m < xi.size(); ++m)
      for (std::size_t j = 0; j < xs.size(); ++j) {
        Mp(m, j) = M_plus_flat(xi[m], xs[j], alpha, R) * std::exp(alpha * xs[j]);
        Mm(m, j) = M_minus_flat(xs[j], xi[m], alpha, R) * std::exp(-alpha * xs[j]);
        Am(m, j) = tilted_airy(-alpha, xi[m] + xs[j], alpha * xs[j]);
        Ap(j, m) = tilted_airy(alpha, xi[m] + xs[j], -alpha * xs[j]);
      }
    auto W = wv(xir).asDiagonal();
    Eigen::MatrixXd MmT = Mm.transpose();
    Eigen::MatrixXd K = MmT * W * Am + Ap * W * Mp - MmT * W * Mp;
    return nystrom_det(K, xr);
  };
  const double X = window_scale * (14 + std::max(0.0, -2 * R));
  const double D = window_scale * (30 + 10 * std::abs(alpha));
  const double v = run(npp, X, D);
  const double coarse = run(std::max(6, npp - 4), 0.8 * X, 0.8 * D);
  return finalize(v, 3 * std::abs(v - coarse) + 1e-14, 0, X, "flat-closed-form");
}

double heat_identity_residual(double s, double t, double x, double y) {
  if (!(t > s)) throw DomainError("heat identity needs s < t");
  const double sig = std::sqrt(2 * (t - s));
  const double shift = 2 * std::abs(s) * (t - s);
  Rule r = composite(y - shift - 14 * sig, y + shift + 14 * sig, 0.5 * sig, 16);
  double acc = 0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r.w[i] * tilted_airy(s, x + r.x[i]) * phi(t - s, r.x[i], y);
  return std::abs(acc - tilted_airy(t, x + y));
}

double barrier_transition(const BarrierSpec& g, double t1, double t2, double xi, double zeta,
                          double tol, EngineOptions o) {
  double prev = BarrierEngine(g, t1, t2, o).transition({xi}, {zeta})(0, 0);
  for (int level = 0; level < 4; ++level) {
    o = o.refined();
    const double v = BarrierEngine(g, t1, t2, o).transition({xi}, {zeta})(0, 0);
    if (std::abs(v - prev) <= tol) return v;
    prev = v;
  }
  throw ConvergenceError("barrier transition did not settle");
}

HittingDensity hitting_density(double xi, double alpha, const BarrierSpec& g, double M,
                               EngineOptions o) {
  return BarrierEngine(g, alpha, M, o).hitting_density(xi);
}

double flat_hitting_time_density(double xi, double alpha, double R, double t) {
  if (t <= alpha || xi >= R) return 0;
  const double d = R - xi, s = t - alpha;
  return d * std::exp(-d * d / (4 * s)) / std::sqrt(4 * std::numbers::pi * s * s * s);
}

McEstimate mc_barrier_cdf(const BarrierSpec& g, double t1, double t2, double xi, double z,
                          long paths, std::uint64_t seed, int steps_per_unit) {
  std::vector<double> knots{t1, t2};
  const int m = std::max(1, static_cast<int>(std::ceil((t2 - t1) * steps_per_unit)));
  for (int i = 1; i < m; ++i) knots.push_back(t1 + (t2 - t1) * i / m);
  for (double b : g.breakpoints())
    if (b > t1 && b < t2) knots.push_back(b);
  if (g.pinned)
    for (double b : {g.t1, g.t2})
      if (b > t1 && b < t2) knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  auto h = [&](double t) { return g.value(t) - t * t; };
  const std::size_t K = knots.size();
  std::vector<double> hk(K), hr(K), hl(K), dt(K);
  for (std::size_t k = 0; k < K; ++k) hk[k] = h(knots[k]);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double d = 1e-10 * (knots[k + 1] - knots[k]);
    hr[k] = h(knots[k] + d);
    hl[k + 1] = h(knots[k + 1] - d);
    dt[k] = knots[k + 1] - knots[k];
  }
  RngStream rng(seed, 0x6d63);
  std::normal_distribution<double> nd;
  std::mt19937_64 eng(rng.next());
  long hits = 0;
  if (xi <= hk[0]) {
    for (long p = 0; p < paths; ++p) {
      double b = xi;
      bool alive = true;
      for (std::size_t k = 0; k + 1 < K && alive; ++k) {
        const double nb = b + std::sqrt(2 * dt[k]) * nd(eng);
        const double A = hr[k] - b, B = hl[k + 1] - nb;
        if (nb > hk[k + 1] || A <= 0 || B <= 0) {
          alive = false;
          break;
        }
        // Maximum of the bridge relative to the linear barrier.
        if (std::isfinite(A) && std::isfinite(B)) {
          const double u = rng.uniform();
          if (u < std::exp(-A * B / dt[k])) alive = false;
        }
        b = nb;
      }
      if (alive && b <= z) ++hits;
    }
  }
  McEstimate e;
  e.paths = paths;
  e.p = double(hits) / paths;
  e.se = std::sqrt(std::max(e.p * (1 - e.p), 1.0 / paths) / paths);
  return e;
}

double engine_barrier_cdf(const BarrierSpec& g, double t1, double t2, double xi, double z,
                          EngineOptions o) {
  BarrierEngine e(g, t1, t2, o);
  const double top = std::min(z, e.cap(e.slices()));
  if (top <= o.lo) return 0;
  Rule r = composite(o.lo, top, 0.5, 16);
  Eigen::MatrixXd T = e.transition({xi}, r.x);
  return T.row(0).dot(wv(r));
}

}  // namespace aztec
