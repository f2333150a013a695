#include "aztec/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace aztec {

EngineOptions EngineOptions::refined() const {
  EngineOptions o = *this;
  o.dt_max *= 0.5;
  o.panel *= 0.5;
  o.panel_cap *= 0.5;
  o.dt_all *= 0.5;
  return o;
}

double HittingDensity::total() const {
  double s = survival;
  for (const auto& h : slices) s += h.mass;
  return atom ? 1.0 : s;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { Alive, HitBelow, Free };

struct LocalPiece {
  double a, b;
  std::function<double(double)> g;
};

std::vector<double> weights_of(const Rule& r) { return r.w; }

}  // namespace

BarrierEngine::BarrierEngine(const BarrierSpec& g, double a, double b, EngineOptions opt)
    : opt_(opt) {
  if (!(a < b)) throw DomainError("barrier engine needs a < b");
  g.check();
  std::vector<LocalPiece> pcs;
  for (const auto& p : g.pieces) pcs.push_back({p.a, p.b, p.g});
  if (g.pinned) {
    const double R = g.R;
    auto par = [R](double t) { return R + t * t; };
    pcs.push_back({-kInf, g.t1, par});
    pcs.push_back({g.t2, kInf, par});
  }
  auto value = [&](double t) {
    double v = kInf;
    for (const auto& p : pcs)
      if (t >= p.a && t <= p.b) v = std::min(v, p.g(t));
    return v;
  };
  std::vector<double> bp{a, b};
  for (const auto& p : pcs) {
    if (p.a > a && p.a < b) bp.push_back(p.a);
    if (p.b > a && p.b < b) bp.push_back(p.b);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  t_.push_back(a);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double u = bp[i], v = bp[i + 1];
    std::vector<const LocalPiece*> cov;
    for (const auto& p : pcs)
      if (p.a <= u && p.b >= v) cov.push_back(&p);
    const int m_all = opt_.dt_all > 0 ? std::max(1, static_cast<int>(std::ceil((v - u) / opt_.dt_all - 1e-9))) : 1;
    if (cov.empty()) {
      for (int j = 0; j < m_all; ++j) {
        sl_.push_back({(v - u) / m_all, true, kInf, kInf});
        t_.push_back(j == m_all - 1 ? v : u + (v - u) * (j + 1) / m_all);
      }
      continue;
    }
    auto h = [&](double t) {
      double m = kInf;
      for (auto* p : cov) m = std::min(m, p->g(t) - t * t);
      return m;
    };
    const double hu = h(u), hv = h(v);
    double dev = 0;
    for (int j = 1; j < 8; ++j) {
      double s = u + (v - u) * j / 8.0;
      dev = std::max(dev, std::abs(h(s) - (hu + (hv - hu) * j / 8.0)));
    }
    const bool linear = dev <= opt_.linear_tol * std::max(1.0, std::abs(hu) + std::abs(hv));
    curved_ = curved_ || !linear;
    int m = linear ? 1 : std::max(1, static_cast<int>(std::ceil((v - u) / opt_.dt_max - 1e-9)));
    m = std::max(m, m_all);
    for (int j = 0; j < m; ++j) {
      double s0 = u + (v - u) * j / m, s1 = u + (v - u) * (j + 1) / m;
      sl_.push_back({s1 - s0, false, j == 0 ? hu : h(s0), j == m - 1 ? hv : h(s1)});
      t_.push_back(j == m - 1 ? v : s1);
    }
  }
  const int K = static_cast<int>(t_.size());
  cap_.resize(K);
  nodes_.resize(K);
  for (int k = 0; k < K; ++k) {
    cap_[k] = value(t_[k]) - t_[k] * t_[k];
    double dt = kInf;
    if (k > 0) dt = std::min(dt, sl_[k - 1].dt);
    if (k + 1 < K) dt = std::min(dt, sl_[k].dt);
    const double pw = std::min(opt_.panel_cap, opt_.panel * std::sqrt(2 * dt));
    Node& nd = nodes_[k];
    nd.t = t_[k];
    nd.cap = cap_[k];
    const double top = std::min(cap_[k], opt_.hi);
    if (top > opt_.lo) nd.below = composite(opt_.lo, top, pw, opt_.npp);
    if (std::isfinite(cap_[k]) && cap_[k] < opt_.hi) {
      const double ext = std::max(opt_.hi, cap_[k] + 10 * std::sqrt(2 * dt));
      nd.above = composite(std::max(cap_[k], opt_.lo), ext, pw, opt_.npp);
    }
  }
}

namespace {

Eigen::MatrixXd kmat(double dt, bool free, double hd, double ha, const std::vector<double>& x,
                     const std::vector<double>& z, Kind kind) {
  Eigen::MatrixXd M(x.size(), z.size());
  const double c = 1.0 / std::sqrt(4 * std::numbers::pi * dt), q = 1.0 / (4 * dt);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double d = z[j] - x[i];
      const double ph = c * std::exp(-d * d * q);
      if (kind == Kind::Free || free) {
        M(i, j) = kind == Kind::HitBelow ? 0.0 : ph;
        continue;
      }
      const double A = hd - x[i], B = ha - z[j];
      double e = (A <= 0 || B <= 0) ? 0.0 : A * B / dt;
      // pc = exp(-e); alive = phi (1 - pc), crossing = phi pc
      M(i, j) = kind == Kind::Alive ? ph * -std::expm1(-e) : ph * std::exp(-e);
    }
  return M;
}

Eigen::Map<const Eigen::VectorXd> wvec(const Rule& r) {
  return Eigen::Map<const Eigen::VectorXd>(r.w.data(), static_cast<Eigen::Index>(r.w.size()));
}

}  // namespace

void BarrierEngine::slice_kernels(int k, const std::vector<double>& x, Eigen::MatrixXd* alive,
                                  Eigen::MatrixXd* hit_below, Eigen::MatrixXd* hit_above,
                                  Eigen::MatrixXd* free_below, Eigen::MatrixXd* free_above) const {
  const Slice& s = sl_[k];
  const Node& nx = nodes_[k + 1];
  if (alive) *alive = kmat(s.dt, s.free, s.hd, s.ha, x, nx.below.x, Kind::Alive);
  if (hit_below) *hit_below = kmat(s.dt, s.free, s.hd, s.ha, x, nx.below.x, Kind::HitBelow);
  if (hit_above) *hit_above = kmat(s.dt, s.free, s.hd, s.ha, x, nx.above.x, Kind::Free);
  if (free_below) *free_below = kmat(s.dt, s.free, s.hd, s.ha, x, nx.below.x, Kind::Free);
  if (free_above) *free_above = kmat(s.dt, s.free, s.hd, s.ha, x, nx.above.x, Kind::Free);
}

Eigen::MatrixXd BarrierEngine::transition(const std::vector<double>& xi,
                                          const std::vector<double>& zeta) const {
  const int N = slices();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(xi.size(), zeta.size());
  std::vector<double> xs;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (xi[i] <= cap_[0]) {
      xs.push_back(xi[i]);
      rows.push_back(i);
    }
  std::vector<double> zs;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < zeta.size(); ++j)
    if (zeta[j] <= cap_[N]) {
      zs.push_back(zeta[j]);
      cols.push_back(j);
    }
  if (xs.empty() || zs.empty()) return out;
  Eigen::MatrixXd T;
  if (N == 1) {
    T = kmat(sl_[0].dt, sl_[0].free, sl_[0].hd, sl_[0].ha, xs, zs, Kind::Alive);
  } else {
    Eigen::MatrixXd f;
    slice_kernels(0, xs, &f, nullptr, nullptr, nullptr, nullptr);
    for (int k = 1; k + 1 < N; ++k) {
      Eigen::MatrixXd al;
      slice_kernels(k, nodes_[k].below.x, &al, nullptr, nullptr, nullptr, nullptr);
      f = (f * wvec(nodes_[k].below).asDiagonal()) * al;
    }
    const Slice& s = sl_[N - 1];
    Eigen::MatrixXd last = kmat(s.dt, s.free, s.hd, s.ha, nodes_[N - 1].below.x, zs, Kind::Alive);
    T = (f * wvec(nodes_[N - 1].below).asDiagonal()) * last;
  }
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t c = 0; c < cols.size(); ++c) out(rows[a], cols[c]) = T(a, c);
  return out;
}

Eigen::MatrixXd BarrierEngine::hit_values(const std::vector<double>& xi, const Payoff& F) const {
  const int N = slices();
  // Payoffs on the grids of nodes 1..N.
  std::vector<Eigen::MatrixXd> Fb(N + 1), Fa(N + 1);
  Eigen::Index ny = -1;
  for (int k = 1; k <= N; ++k) {
    if (nodes_[k].below.size()) Fb[k] = F(t_[k], nodes_[k].below.x);
    if (nodes_[k].above.size()) Fa[k] = F(t_[k], nodes_[k].above.x);
    if (Fb[k].size()) ny = Fb[k].cols();
    if (Fa[k].size()) ny = Fa[k].cols();
  }
  Eigen::MatrixXd atom;
  std::vector<double> above_xi;
  for (double v : xi)
    if (v > cap_[0]) above_xi.push_back(v);
  if (!above_xi.empty()) {
    atom = F(t_[0], above_xi);
    ny = atom.cols();
  }
  if (ny < 0) ny = F(t_[N], std::vector<double>{0.0}).cols();

  auto step = [&](int k, const std::vector<double>& x, const Eigen::MatrixXd& Vnext) {
    Eigen::MatrixXd al, hb, ha;
    slice_kernels(k, x, &al, &hb, &ha, nullptr, nullptr);
    const Node& nx = nodes_[k + 1];
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(x.size(), ny);
    if (nx.below.size()) {
      V += hb * wvec(nx.below).asDiagonal() * Fb[k + 1];
      V += al * wvec(nx.below).asDiagonal() * Vnext;
    }
    if (nx.above.size()) V += ha * wvec(nx.above).asDiagonal() * Fa[k + 1];
    return V;
  };

  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(nodes_[N].below.size(), ny);
  for (int k = N - 1; k >= 1; --k) V = step(k, nodes_[k].below.x, V);
  std::vector<double> below_xi;
  for (double v : xi)
    if (v <= cap_[0]) below_xi.push_back(v);
  Eigen::MatrixXd V0;
  if (!below_xi.empty()) V0 = step(0, below_xi, V);
  Eigen::MatrixXd out(xi.size(), ny);
  std::size_t ib = 0, ia = 0;
  for (std::size_t i = 0; i < xi.size(); ++i)
    out.row(i) = xi[i] <= cap_[0] ? V0.row(ib++) : atom.row(ia++);
  return out;
}

Eigen::MatrixXd BarrierEngine::crossed_forward(const Payoff& a, const std::vector<double>& eta) const {
  return crossed_from(0, Eigen::MatrixXd(), a, eta);
}

Eigen::MatrixXd BarrierEngine::crossed_transition(const std::vector<double>& xi,
                                                  const std::vector<double>& zeta) const {
  const int N = slices();
  const double t0 = t_[0];
  Payoff a = [&](double t, const std::vector<double>& z) {
    return kmat(t - t0, true, kInf, kInf, z, xi, Kind::Free);
  };
  Eigen::MatrixXd out = kmat(t_[N] - t0, true, kInf, kInf, xi, zeta, Kind::Free);
  std::vector<double> xs;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (xi[i] <= cap_[0]) {
      xs.push_back(xi[i]);
      rows.push_back(i);
    }
  if (xs.empty()) return out;
  Payoff as = [&](double t, const std::vector<double>& z) {
    return kmat(t - t0, true, kInf, kInf, z, xs, Kind::Free);
  };
  Eigen::MatrixXd c;
  if (N == 1) {
    c = Eigen::MatrixXd(xs.size(), zeta.size());
    std::vector<double> zs;
    for (double v : zeta)
      if (v <= cap_[N]) zs.push_back(v);
    Eigen::MatrixXd hb = zs.empty() ? Eigen::MatrixXd()
                                    : kmat(sl_[0].dt, sl_[0].free, sl_[0].hd, sl_[0].ha, xs, zs, Kind::HitBelow);
    std::size_t ib = 0;
    for (std::size_t j = 0; j < zeta.size(); ++j)
      c.col(j) = zeta[j] <= cap_[N] ? Eigen::VectorXd(hb.col(ib++))
                                    : Eigen::VectorXd(as(t_[N], {zeta[j]}).row(0).transpose());
  } else {
    Eigen::MatrixXd hb;
    slice_kernels(0, xs, nullptr, &hb, nullptr, nullptr, nullptr);
    c = crossed_from(1, hb.transpose(), as, zeta);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(rows[r]) = c.row(r);
  return out;
}

Eigen::MatrixXd BarrierEngine::crossed_from(int k0, Eigen::MatrixXd d, const Payoff& a,
                                            const std::vector<double>& eta) const {
  const int N = slices();
  // d = free flow minus survivors, kept on the below grid; above the cap it equals a.
  Eigen::Index rows = d.size() ? d.cols() : -1;
  auto step = [&](int k, const std::vector<double>& to) {
    const Node& nk = nodes_[k];
    const Slice& s = sl_[k];
    Eigen::MatrixXd out;
    if (nk.below.size()) {
      Eigen::MatrixXd ak = a(t_[k], nk.below.x);
      rows = ak.cols();
      Eigen::MatrixXd al = kmat(s.dt, s.free, s.hd, s.ha, nk.below.x, to, Kind::Alive);
      Eigen::MatrixXd cr = kmat(s.dt, s.free, s.hd, s.ha, nk.below.x, to, Kind::HitBelow);
      if (d.cols() != rows || d.rows() != static_cast<Eigen::Index>(nk.below.size()))
        d = Eigen::MatrixXd::Zero(nk.below.size(), rows);
      out = al.transpose() * wvec(nk.below).asDiagonal() * d +
            cr.transpose() * wvec(nk.below).asDiagonal() * ak;
    }
    if (nk.above.size()) {
      Eigen::MatrixXd ak = a(t_[k], nk.above.x);
      rows = ak.cols();
      Eigen::MatrixXd fr = kmat(s.dt, true, kInf, kInf, nk.above.x, to, Kind::Free);
      Eigen::MatrixXd add = fr.transpose() * wvec(nk.above).asDiagonal() * ak;
      out = out.size() ? Eigen::MatrixXd(out + add) : add;
    }
    if (!out.size()) out = Eigen::MatrixXd::Zero(to.size(), std::max<Eigen::Index>(rows, 0));
    return out;
  };
  for (int k = k0; k + 1 < N; ++k) d = step(k, nodes_[k + 1].below.x);
  std::vector<double> zs;
  for (double v : eta)
    if (v <= cap_[N]) zs.push_back(v);
  Eigen::MatrixXd last = zs.empty() ? Eigen::MatrixXd() : step(N - 1, zs);
  std::vector<double> up;
  for (double v : eta)
    if (v > cap_[N]) up.push_back(v);
  Eigen::MatrixXd au = up.empty() ? Eigen::MatrixXd() : a(t_[N], up);
  if (rows < 0) rows = au.cols();
  Eigen::MatrixXd out(rows, eta.size());
  std::size_t ib = 0, ia = 0;
  for (std::size_t j = 0; j < eta.size(); ++j)
    out.col(j) = eta[j] <= cap_[N] ? Eigen::VectorXd(last.row(ib++).transpose())
                                   : Eigen::VectorXd(au.row(ia++).transpose());
  return out;
}

HittingDensity BarrierEngine::hitting_density(double xi) const {
  HittingDensity h;
  if (xi > cap_[0]) {
    h.atom = true;
    return h;
  }
  const int N = slices();
  Eigen::RowVectorXd f;
  for (int k = 0; k < N; ++k) {
    const Node& nx = nodes_[k + 1];
    Eigen::MatrixXd al, hb, ha;
    std::vector<double> x = k == 0 ? std::vector<double>{xi} : nodes_[k].below.x;
    slice_kernels(k, x, &al, &hb, &ha, nullptr, nullptr);
    Eigen::RowVectorXd src = k == 0 ? Eigen::RowVectorXd::Ones(1)
                                    : Eigen::RowVectorXd(f.cwiseProduct(wvec(nodes_[k].below).transpose()));
    double mass = 0;
    if (nx.below.size()) mass += (src * hb * wvec(nx.below)).sum();
    if (nx.above.size()) mass += (src * ha * wvec(nx.above)).sum();
    h.slices.push_back({t_[k], t_[k + 1], mass});
    f = nx.below.size() ? Eigen::RowVectorXd(src * al) : Eigen::RowVectorXd();
  }
  h.survival = f.size() ? f.dot(wvec(nodes_[N].below)) : 0.0;
  return h;
}

}  // namespace aztec
