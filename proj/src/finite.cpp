#include "aztec/finite.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace aztec {

using boost::multiprecision::cpp_int;
using cd = std::complex<double>;

namespace {

long double to_ld(const cpp_int& v, long shift2) {
  // v * 2^{-shift2} without overflowing the intermediate conversion.
  if (v == 0) return 0.0L;
  cpp_int a = abs(v);
  long bits = static_cast<long>(boost::multiprecision::msb(a)) + 1;
  long drop = std::max(0L, bits - 64);
  cpp_int top = a >> drop;
  long double m = top.convert_to<long double>();
  long double r = std::ldexp(m, static_cast<int>(drop - shift2));
  return v < 0 ? -r : r;
}

double det_one_minus(const Eigen::MatrixXd& K) {
  if (K.rows() == 0) return 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(K.rows(), K.cols()) - K;
  return A.partialPivLu().determinant();
}

FiniteDet finish(double raw, std::size_t size) {
  FiniteDet d;
  d.raw = raw;
  d.size = size;
  d.value = std::clamp(raw, 0.0, 1.0);
  d.clamped = raw < -1e-10 || raw > 1 + 1e-10;
  return d;
}

}  // namespace

Krawtchouk::Krawtchouk(int n) : n_(n) {
  if (n < 1) throw DomainError("Krawtchouk: n must be positive");
  qcoef_.resize(n + 1);
}

long double Krawtchouk::q(int s, long y) const {
  if (s < 0 || s > n_) throw DomainError("q: s outside [0, n]");
  long d = s - y;
  if (d < 0 || d > n_) return 0.0L;
  auto& c = qcoef_[s];
  if (c.empty()) {
    // (1-w)^{n-s} (1+w)^s by exact convolution.
    std::vector<cpp_int> a(n_ + 1, 0);
    cpp_int b = 1;
    std::vector<cpp_int> f(n_ - s + 1), g(s + 1);
    for (int i = 0; i <= n_ - s; ++i) {
      f[i] = (i % 2 ? -b : b);
      b = b * (n_ - s - i) / (i + 1);
    }
    b = 1;
    for (int i = 0; i <= s; ++i) {
      g[i] = b;
      b = b * (s - i) / (i + 1);
    }
    for (int i = 0; i <= n_ - s; ++i)
      for (int j = 0; j <= s; ++j) a[i + j] += f[i] * g[j];
    c.resize(n_ + 1);
    for (int i = 0; i <= n_; ++i) c[i] = to_ld(a[i], 0);
  }
  long double v = c[d];
  if (!qdelta_.empty()) {
    auto it = qdelta_.find({s, y});
    if (it != qdelta_.end()) v += it->second;
  }
  return v;
}

void Krawtchouk::corrupt_q(int s, long y, long double delta) { qdelta_[{s, y}] += delta; }

long double Krawtchouk::p(int r, long x) const {
  if (r < 0 || r > n_) throw DomainError("p: r outside [0, n]");
  if (x < -n_ + r) throw DomainError("p: x < -n + r (integrand singular at infinity)");
  const int m = n_ - r;
  if (m == 0) return 0.0L;
  long long key = static_cast<long long>(r) * 4000003LL + (x + 2000000);
  auto it = pcache_.find(key);
  if (it != pcache_.end()) return it->second;
  // p = -(-1)^m 2^{-(n-1)} sum_{i+j=m-1} C(a,i) C(-r,j) 2^{m-1-j},  a = r - x - 1.
  const long a = r - x - 1;
  std::vector<cpp_int> ca(m), cr(m);
  ca[0] = 1;
  for (int i = 1; i < m; ++i) ca[i] = ca[i - 1] * (a - (i - 1)) / i;
  cr[0] = 1;
  for (int j = 1; j < m; ++j) cr[j] = cr[j - 1] * (-r - (j - 1)) / j;
  cpp_int tot = 0;
  for (int j = 0; j < m; ++j) tot += (ca[m - 1 - j] * cr[j]) << (m - 1 - j);
  if (m % 2 == 0) tot = -tot;
  long double v = to_ld(tot, n_ - 1);
  pcache_.emplace(key, v);
  return v;
}

namespace {
std::map<int, std::unique_ptr<Krawtchouk>>& kcache() {
  static std::map<int, std::unique_ptr<Krawtchouk>> c;
  return c;
}
}  // namespace

Krawtchouk& krawtchouk_mutable(int n) {
  auto& c = kcache();
  auto it = c.find(n);
  if (it == c.end()) it = c.emplace(n, std::make_unique<Krawtchouk>(n)).first;
  return *it->second;
}

const Krawtchouk& krawtchouk(int n) { return krawtchouk_mutable(n); }

ShiftResidual shift_identity_residual(int n) {
  const Krawtchouk& K = krawtchouk(n);
  ShiftResidual r;
  for (int s = 0; s < n; ++s)
    for (long y = s - n - 2; y <= s + 3; ++y) {
      long double acc = 0;
      for (long x = s - n; x <= s; ++x) acc += K.q(s, x) * transition_T(x, y);
      r.q_side = std::max(r.q_side, static_cast<double>(std::fabs(acc - K.q(s + 1, y))));
    }
  for (int k = 1; k <= n; ++k)
    for (long x = -n + k; x <= n + 3; ++x) {
      long double lhs = K.p(k, x) + K.p(k, x + 1);
      long double rhs = K.p(k - 1, x) - K.p(k - 1, x - 1);
      r.p_side = std::max(r.p_side, static_cast<double>(std::fabs(lhs - rhs)));
    }
  return r;
}

// ---------------------------------------------------------------- quadrature modes

namespace {

using cld = std::complex<long double>;

cld ipow(cld z, long k) {
  if (k < 0) return 1.0L / ipow(z, -k);
  cld r = 1.0L;
  for (; k; k >>= 1, z *= z)
    if (k & 1) r *= z;
  return r;
}

cld on_circle(const ContourSpec& c, int k, int M) {
  const long double th = 2 * std::numbers::pi_v<long double> * k / M;
  return cld(c.radius * std::cos(th), c.radius * std::sin(th));
}

double q_trap(int n, int s, long y, const ContourSpec& c, int M) {
  cld acc = 0;
  const cld c0(c.center.real(), c.center.imag());
  for (int k = 0; k < M; ++k) {
    const cld dw = on_circle(c, k, M);  // dw / (i dtheta)
    const cld w = c0 + dw;
    acc += ipow(w, y - 1) * ipow(1.0L - w, n - s) * ipow(1.0L + 1.0L / w, s) * dw;
  }
  return static_cast<double>(acc.real() / M);
}

double p_trap(int n, int r, long x, const ContourSpec& c, int M) {
  cld acc = 0;
  const cld c0(c.center.real(), c.center.imag());
  for (int k = 0; k < M; ++k) {
    const cld dz = on_circle(c, k, M);
    const cld z = c0 + dz;
    acc += ipow(z, r - x - 1) / (ipow(1.0L - z, n - r) * ipow(1.0L + z, r)) * dz;
  }
  return -static_cast<double>(acc.real() / M);
}

}  // namespace

double q_fn(int n, int s, long y, EvalMode mode, ContourSpec c) {
  if (mode == EvalMode::Exact) return static_cast<double>(krawtchouk(n).q(s, y));
  if (c.encloses(1.0) || !c.encloses(0.0)) throw DomainError("q contour must enclose 0 only");
  return q_trap(n, s, y, c, c.nodes);
}

double p_fn(int n, int r, long x, EvalMode mode, ContourSpec c) {
  if (x < -n + r) throw DomainError("p: x < -n + r");
  if (mode == EvalMode::Exact) return static_cast<double>(krawtchouk(n).p(r, x));
  if (c.encloses(0.0) || c.encloses(-1.0) || !c.encloses(1.0))
    throw DomainError("p contour must enclose 1 only");
  return p_trap(n, r, x, c, c.nodes);
}

double q_quadrature_adaptive(int n, int s, long y, ContourSpec c, double tol) {
  int M = std::max(16, c.nodes);
  double prev = q_trap(n, s, y, c, M);
  for (int it = 0; it < 12; ++it) {
    M *= 2;
    double cur = q_trap(n, s, y, c, M);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

double p_quadrature_adaptive(int n, int r, long x, ContourSpec c, double tol) {
  int M = std::max(16, c.nodes);
  double prev = p_trap(n, r, x, c, M);
  for (int it = 0; it < 12; ++it) {
    M *= 2;
    double cur = p_trap(n, r, x, c, M);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

// ---------------------------------------------------------------- kernels

static void check_even(int t) {
  if (t % 2 != 0) throw DomainError("times must be even");
}

double ktilde(int n, int two_r, long x, int two_s, long y) {
  check_even(two_r);
  check_even(two_s);
  const int r = two_r / 2, s = two_s / 2;
  const auto& kr = krawtchouk(n);
  long double acc = 0;
  for (long j = std::max(0L, (s - n) - y); j <= s - y; ++j) acc += kr.p(r, x + j) * kr.q(s, y + j);
  return static_cast<double>(acc);
}

double ktilde_double_contour(int n, int two_r, long x, int two_s, long y, int nodes, double rho0,
                             double rho1) {
  const int r = two_r / 2, s = two_s / 2;
  std::vector<cd> zs(nodes), zw(nodes), ws(nodes), ww(nodes);
  for (int k = 0; k < nodes; ++k) {
    cd e = std::exp(cd(0, 2 * std::numbers::pi * k / nodes));
    zs[k] = 1.0 + rho1 * e;
    zw[k] = rho1 * e / double(nodes);  // dz/(2 pi i)
    ws[k] = rho0 * e;
    ww[k] = rho0 * e / double(nodes);
  }
  cd acc = 0;
  for (int a = 0; a < nodes; ++a) {
    cd z = zs[a];
    cd fz = 1.0 / (z * std::pow(z, double(x)) * std::pow(1.0 - z, n - r) * std::pow(1.0 + 1.0 / z, r));
    for (int b = 0; b < nodes; ++b) {
      cd w = ws[b];
      cd fw = std::pow(w, double(y) - 1.0) * std::pow(1.0 - w, n - s) * std::pow(1.0 + 1.0 / w, s);
      acc += zw[a] * ww[b] * fz * fw * z / (z - w);
    }
  }
  return -acc.real();
}

double kn_entry(int n, int two_r, long x, int two_s, long y) {
  double v = ktilde(n, two_r, x, two_s, y);
  if (two_r < two_s) v -= t_power_exact((two_s - two_r) / 2, x, y);
  return v;
}

namespace {

double joint_cdf_margin(int n, const std::vector<int>& times, const std::vector<long>& levels,
                        int margin, std::size_t* size) {
  std::vector<std::pair<int, long>> pts;
  for (std::size_t i = 0; i < times.size(); ++i)
    for (long y = levels[i] + 1; y <= times[i] / 2 + margin; ++y) pts.push_back({times[i], y});
  const std::size_t N = pts.size();
  *size = N;
  Eigen::MatrixXd K(N, N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      K(a, b) = kn_entry(n, pts[a].first, pts[a].second, pts[b].first, pts[b].second);
  return det_one_minus(K);
}

void check_times(int n, const std::vector<int>& times, const std::vector<long>& levels) {
  if (times.size() != levels.size() || times.empty())
    throw DomainError("times and levels must be non-empty and of equal length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    check_even(times[i]);
    if (times[i] < 2 || times[i] > 2 * n - 2) throw DomainError("time outside {2,...,2n-2}");
    if (i && times[i] <= times[i - 1]) throw DomainError("times must increase");
  }
}

}  // namespace

FiniteDet joint_cdf_Y(int n, const std::vector<int>& even_times, const std::vector<long>& levels,
                      int margin) {
  check_times(n, even_times, levels);
  // Y(s) >= s/2 - n, so a level below that is an empty event.
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] < even_times[i] / 2 - n) return finish(0.0, 0);
  std::size_t sz = 0, sz2 = 0;
  double v = joint_cdf_margin(n, even_times, levels, margin, &sz);
  double v2 = joint_cdf_margin(n, even_times, levels, 2 * margin + 2, &sz2);
  FiniteDet d = finish(v, sz);
  d.stability_delta = std::abs(v2 - v);
  return d;
}

// ---------------------------------------------------------------- path integral

double path_weight_operator(const std::vector<int>& ts, const std::vector<long>& xs, int i, long x,
                            long w) {
  if (x > xs[0]) return 0.0;
  std::map<long, double> cur{{x, 1.0}};
  std::map<std::pair<int, long>, double> tcache;
  auto Tm = [&](int d, long a, long b) {
    auto key = std::make_pair(d, a - b);
    auto it = tcache.find(key);
    if (it != tcache.end()) return it->second;
    double v = t_power_exact(d, a, b);
    tcache.emplace(key, v);
    return v;
  };
  for (int k = 1; k <= i; ++k) {
    int d = ts[k] - ts[k - 1];
    long lo = w - (ts[i] - ts[k]);
    std::map<long, double> nxt;
    for (auto [z, c] : cur)
      for (long z2 = lo; z2 <= z + d; ++z2) {
        double v = Tm(d, z, z2);
        if (v != 0) nxt[z2] += c * v;
      }
    if (k < i)
      for (auto it = nxt.begin(); it != nxt.end();) it = it->first > xs[k] ? nxt.erase(it) : std::next(it);
    cur.swap(nxt);
  }
  auto it = cur.find(w);
  return it == cur.end() ? 0.0 : it->second;
}

double path_weight_bridge(const std::vector<int>& ts, const std::vector<long>& xs, int i, long x,
                          long w) {
  if (x > xs[0]) return 0.0;
  const int m = ts[i] - ts[0];
  std::vector<long> caps(m + 1, kNoCapL);
  for (int j = 0; j < i; ++j) caps[ts[j] - ts[0]] = xs[j];
  auto br = bridge_stay_below(m, x, w, caps);
  if (br.degenerate) return 0.0;
  return std::pow(kSilver, double(2 * m - (w - x))) * br.free_bridge * br.probability;
}

PathIntegralResult joint_cdf_Y_pathintegral(int n, const std::vector<int>& even_times,
                                            const std::vector<long>& levels) {
  check_times(n, even_times, levels);
  std::vector<int> ts;
  for (int t : even_times) ts.push_back(t / 2);
  const int t0 = ts[0];
  const long lo = t0 - n, hi = t0;
  const std::size_t N = static_cast<std::size_t>(hi - lo + 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  PathIntegralResult res;
  for (long x = lo; x <= hi; ++x) {
    const std::size_t a = static_cast<std::size_t>(x - lo);
    if (x > levels[0])
      for (long y = lo; y <= hi; ++y) A(a, y - lo) += ktilde(n, 2 * t0, x, 2 * t0, y);
    for (std::size_t i = 1; i < ts.size(); ++i) {
      for (long w = levels[i] + 1; w <= levels[i - 1] + ts[i] - ts[i - 1]; ++w) {
        double h = path_weight_operator(ts, levels, static_cast<int>(i), x, w);
        double hb = path_weight_bridge(ts, levels, static_cast<int>(i), x, w);
        res.path_weight_discrepancy =
            std::max(res.path_weight_discrepancy, std::abs(h - hb) / std::max(1.0, std::abs(h)));
        if (h == 0) continue;
        for (long y = lo; y <= hi; ++y) A(a, y - lo) += h * ktilde(n, 2 * ts[i], w, 2 * t0, y);
      }
    }
  }
  res.det = finish(det_one_minus(A), N);
  return res;
}

// ---------------------------------------------------------------- hitting kernel

namespace {

// Smallest start value at step m0 from which some cap can be exceeded.
long min_hitting_start(const std::vector<long>& caps) {
  long best = kNoCapL;
  for (std::size_t k = 0; k < caps.size(); ++k)
    if (caps[k] < kNoCapL) best = std::min(best, caps[k] + 1 - static_cast<long>(k));
  return best;
}

}  // namespace

namespace {

// Rows i in [0, rows), columns j in [0, cols).
Eigen::MatrixXd hitting_matrix(int n, int m0, const std::vector<long>& caps, double conj,
                               long u_min, int imax, int rows, int cols) {
  const auto& kr = krawtchouk(n);
  const long u_lo = std::max(u_min, static_cast<long>(m0 - n - imax));
  const long double ls = std::log(static_cast<long double>(kSilver));
  const long double lc = std::log(static_cast<long double>(conj));
  const long double l2 = std::log(2.0L);
  // K = A C with C(u,j) = sum over first hits (l,v) from u of P(hit) B(l,v,j).
  const std::size_t U = static_cast<std::size_t>(m0 - u_lo + 1);
  Eigen::MatrixXd Am(rows, U), Cm = Eigen::MatrixXd::Zero(U, cols);
  for (long u = u_lo; u <= m0; ++u) {
    const std::size_t c = static_cast<std::size_t>(u - u_lo);
    for (int i = 0; i < rows; ++i) {
      long double qv = kr.q(m0, u + i);
      long double e = ls * (u + i - 2 * m0 + n) + lc * i - 0.5L * n * l2;
      Am(i, c) = qv == 0 ? 0.0 : static_cast<double>(qv * std::exp(e));
    }
    auto fp = first_passage_dp(u, m0, caps);
    for (const auto& h : fp.hits)
      for (int j = 0; j < cols; ++j) {
        long double pv = kr.p(h.l, h.v + j);
        long double e = ls * (2 * h.l - h.v - j - n) - lc * j + 0.5L * n * l2;
        Cm(c, j) += static_cast<double>(h.p * pv * std::exp(e));
      }
  }
  return Am * Cm;
}

}  // namespace

HittingKernel build_hitting_kernel(int n, int m0, const std::vector<long>& caps, double conj) {
  HittingKernel hk;
  hk.n = n;
  hk.m0 = m0;
  hk.caps = caps;
  const int m1 = m0 + static_cast<int>(caps.size()) - 1;
  if (m0 < 0 || m1 > n) throw DomainError("hitting kernel: times outside [0, n]");
  hk.u_min = min_hitting_start(caps);
  if (hk.u_min >= kNoCapL || hk.u_min > m0) return hk;
  hk.imax = static_cast<int>(m0 - hk.u_min);
  const int F = hk.imax + 1;
  Eigen::MatrixXd K = hitting_matrix(n, m0, caps, conj, hk.u_min, hk.imax, F, F);
  hk.K.assign(F, std::vector<double>(F));
  for (int i = 0; i < F; ++i)
    for (int j = 0; j < F; ++j) hk.K[i][j] = K(i, j);
  return hk;
}

HittingKernel build_hitting_kernel_dense(int n, int m0, const std::vector<long>& caps) {
  HittingKernel hk;
  hk.n = n;
  hk.m0 = m0;
  hk.caps = caps;
  hk.u_min = min_hitting_start(caps);
  if (hk.u_min >= kNoCapL || hk.u_min > m0) return hk;
  hk.imax = static_cast<int>(m0 - hk.u_min);
  const int F = hk.imax + 1;
  const int K = static_cast<int>(caps.size());
  const auto& kr = krawtchouk(n);
  // Value window: [u_min - K, m0 + K]; lower values can never hit later caps.
  const long lo = hk.u_min - K - 1, hi = m0 + K + 1;
  const int W = static_cast<int>(hi - lo + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(W, W);
  for (int a = 0; a < W; ++a)
    for (int b = 0; b < W; ++b) T(a, b) = transition_T(lo + a, lo + b);
  auto Pbar = [&](long cap) {
    Eigen::VectorXd d(W);
    for (int a = 0; a < W; ++a) d(a) = (cap >= kNoCapL || lo + a <= cap) ? 1.0 : 0.0;
    return d;
  };
  const long u_lo = std::max(hk.u_min, static_cast<long>(m0 - n - hk.imax));
  // Rows of Wcur: start u; columns: current value. Weighted first-hit by T-matrix products.
  Eigen::MatrixXd Wcur = Eigen::MatrixXd::Identity(W, W);
  std::vector<std::vector<long double>> acc(F, std::vector<long double>(F, 0.0L));
  for (int k = 0; k < K; ++k) {
    if (k > 0) Wcur = Wcur * T;
    Eigen::VectorXd keep = Pbar(caps[k]);
    // Hits at step k: mass above cap.
    for (long u = u_lo; u <= m0; ++u) {
      for (int b = 0; b < W; ++b) {
        if (keep(b) != 0) continue;
        double wgt = Wcur(u - lo, b);
        if (wgt == 0) continue;
        long v = lo + b;
        for (int i = 0; i < F; ++i) {
          long double qv = kr.q(m0, u + i);
          if (qv == 0) continue;
          for (int j = 0; j < F; ++j)
            acc[i][j] += std::pow(static_cast<long double>(kSilver), static_cast<long double>(i - j)) *
                         qv * wgt * kr.p(m0 + k, v + j);
        }
      }
    }
    Wcur = Wcur * keep.asDiagonal();
  }
  hk.K.assign(F, std::vector<double>(F));
  for (int i = 0; i < F; ++i)
    for (int j = 0; j < F; ++j) hk.K[i][j] = static_cast<double>(acc[i][j]);
  return hk;
}

FiniteDet stay_below_caps(int n, int m0, const std::vector<long>& caps, double conj) {
  auto hk = build_hitting_kernel(n, m0, caps, conj);
  if (hk.trivial()) return finish(1.0, 0);
  const int F = hk.imax + 1;
  Eigen::MatrixXd K(F, F);
  for (int i = 0; i < F; ++i)
    for (int j = 0; j < F; ++j) K(i, j) = hk.K[i][j];
  FiniteDet d = finish(det_one_minus(K), F);
  // Window doubling: rows beyond imax vanish identically; recompute with an enlarged window.
  const int F2 = 2 * F;
  Eigen::MatrixXd K2 = Eigen::MatrixXd::Zero(F2, F2);
  K2.topLeftCorner(F, F) = K;
  d.stability_delta = std::abs(det_one_minus(K2) - d.raw);
  return d;
}

static std::vector<long> to_long_caps(const DiscreteBarrier& db) {
  std::vector<long> caps;
  for (int c : db.caps) caps.push_back(c >= kNoCap ? kNoCapL : c);
  return caps;
}

FiniteDet stay_below_prob_finite(int n, const BarrierSpec& g, double L, double M) {
  if (L > M) throw DomainError("stay_below_prob_finite: L > M");
  auto db = discretize_barrier(n, g, L, M);
  return stay_below_caps(n, db.m0, to_long_caps(db));
}

double hitting_kernel_entry(int n, double L, double M, const BarrierSpec& g, int i, int j) {
  if (i < 0 || j < 0) throw DomainError("hitting kernel indices must be nonnegative");
  auto db = discretize_barrier(n, g, L, M);
  auto caps = to_long_caps(db);
  long u_min = min_hitting_start(caps);
  if (u_min >= kNoCapL || u_min > db.m0) return 0.0;
  int imax = static_cast<int>(db.m0 - u_min);
  if (i > imax) return 0.0;
  return hitting_matrix(n, db.m0, caps, 1.0, u_min, imax, i + 1, j + 1)(i, j);
}

// ---------------------------------------------------------------- rescaled P, Q

RescaledPQ rescaled_PQ(int n, double t, double zy, double L, double xxi) {
  RescaledPQ out;
  const double c1 = std::pow(2.0, -5.0 / 6.0) * std::cbrt(double(n));
  const double c2 = std::pow(2.0, -1.0 / 6.0) * std::pow(double(n), 2.0 / 3.0);
  const double base = n * (1.0 + 1.0 / std::sqrt(2.0));
  out.l = static_cast<int>(std::lround((base + c2 * t) / 2.0));
  out.vj = std::lround(n / std::sqrt(2.0) + c1 * zy);
  ScalingMap sm{n, 0.0};
  out.m0 = sm.b_even(L) / 2;
  out.ui = std::lround(n / std::sqrt(2.0) + c1 * xxi);
  if (out.l < 0 || out.l >= n || out.m0 < 0 || out.m0 > n || out.vj < -n + out.l)
    throw DomainError("rescaled_PQ: arguments outside the admissible lattice range");
  out.t_eff = (2.0 * out.l - base) / c2;
  out.zy_eff = (out.vj - n / std::sqrt(2.0)) / c1;
  out.L_eff = (2.0 * out.m0 - base) / c2;
  out.xxi_eff = (out.ui - n / std::sqrt(2.0)) / c1;
  const auto& kr = krawtchouk(n);
  const long double ls = std::log(static_cast<long double>(kSilver));
  const long double l2 = std::log(2.0L);
  long double pv = kr.p(out.l, out.vj);
  long double qv = kr.q(out.m0, out.ui);
  out.P = static_cast<double>(c1 * pv * std::exp(0.5L * n * l2 + ls * (2 * out.l - out.vj - n)));
  out.Q = static_cast<double>(c1 * qv * std::exp(-0.5L * n * l2 + ls * (out.ui - 2 * out.m0 + n)));
  return out;
}

// ---------------------------------------------------------------- contour advisor

double steep_rhs(double rho) { return (1 + rho * rho) / (2 * std::sqrt(2.0) * rho); }

double steep_Q(double R, double r, double phi) {
  const double s2 = std::sqrt(2.0);
  return 6 * s2 - 4 + (3 * s2 + 2) * R * R + 16 * r + 4 * R * R * r -
         8 * s2 * R * (1 + s2 * r) * std::cos(phi);
}

SteepDescentReport contour_advisor(double r) {
  SteepDescentReport rep;
  rep.r = r;
  const double s2 = std::sqrt(2.0);
  cd disc = std::sqrt(cd(8 * s2 * r + 16 * r * r, 0.0));
  cd den = 2 + s2 + 4 * r;
  rep.z_plus = (s2 + disc) / den;
  rep.z_minus = (s2 - disc) / den;
  rep.complex_pair = std::abs(rep.z_plus.imag()) > 0;
  for (double rho : {0.2, 0.3, s2 - 1, 0.5, 0.6, 0.8}) {
    rep.rho_candidates.push_back(rho);
    rep.gamma0_steep.push_back(steep_rhs(rho) >= 1.0 - 1e-15);
  }
  for (double R : {0.3, 0.45, 0.55, 0.7, 0.9}) {
    rep.R_candidates.push_back(R);
    bool ok = true;
    for (int k = 1; k < 256; ++k)
      if (steep_Q(R, r, std::numbers::pi * k / 256) <= 0) ok = false;
    rep.gamma1_Q_positive.push_back(ok);
  }
  double rz = std::abs(rep.z_plus);
  if (std::isfinite(rz) && rz > 0.05 && rz < 0.95) rep.suggested_rho0 = rz;
  double r1 = std::abs(1.0 - rep.z_minus);
  if (std::isfinite(r1) && r1 > 0.05 && r1 < 0.95) rep.suggested_rho1 = r1;
  return rep;
}

}  // namespace aztec
