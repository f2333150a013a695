#include "aztec/walk.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>

namespace aztec {

using boost::multiprecision::cpp_int;

double StepLaw::x1(int k) {
  if (k == 1) return 1.0 / kSqrt2;
  if (k == 0) return kWalkP / kSqrt2;
  return 0.0;
}

double StepLaw::x2(int k) {
  if (k > 0) return 0.0;
  return kSqrt2 * std::pow(kWalkP, 1 - k);
}

double StepLaw::x(int k) {
  if (k > 1) return 0.0;
  if (k == 1) return kWalkP;
  return 2.0 * std::pow(kWalkP, 2 - k);
}

double StepLaw::x_by_convolution(int k, double tol) {
  // X = X1 + X2 with X1 in {0,1}: two terms, no truncation needed beyond tol checks.
  double v = x1(0) * x2(k) + x1(1) * x2(k - 1);
  return std::abs(v) < tol * tol ? 0.0 : v;
}

double StepLaw::mean() {
  double m = 0;
  for (int k = 1; k >= -200; --k) m += k * x(k);
  return m;
}

double StepLaw::variance() {
  double v = 0;
  for (int k = 1; k >= -200; --k) v += double(k) * k * x(k);
  return v - mean() * mean();
}

double step_pmf(int k) { return StepLaw::x(k); }

double transition_T(long x, long y) {
  if (y <= x) return 2.0;
  if (y == x + 1) return 1.0;
  return 0.0;
}

double transition_identity_residual(long x, long y) {
  long d = y - x;
  double rhs = d > 1 ? 0.0 : std::pow(kSilver, double(2 - d)) * step_pmf(static_cast<int>(d));
  return std::abs(transition_T(x, y) - rhs);
}

std::vector<double> walk_step(const std::vector<double>& f, double* dropped) {
  // f indexed from lo; output indexed from lo with one extra slot on top.
  const std::size_t N = f.size();
  std::vector<double> g(N, 0.0), h(N + 1, 0.0);
  // X2: g(w) = (1-p) f(w) + p g(w+1)
  double carry = 0;
  for (std::size_t i = N; i-- > 0;) {
    carry = (1 - kWalkP) * f[i] + kWalkP * carry;
    g[i] = carry;
  }
  if (dropped) {
    double tot_f = 0, tot_g = 0;
    for (double v : f) tot_f += v;
    for (double v : g) tot_g += v;
    *dropped += tot_f - tot_g;
  }
  // X1: h(w) = a g(w) + b g(w-1)
  const double a = 1 - 1 / kSqrt2, b = 1 / kSqrt2;
  for (std::size_t i = 0; i <= N; ++i) {
    double gi = i < N ? g[i] : 0.0;
    double gm = i > 0 ? g[i - 1] : 0.0;
    h[i] = a * gi + b * gm;
  }
  return h;
}

WalkPmf walk_pmf(int m, double tail_tol) {
  if (m < 0) throw std::invalid_argument("walk_pmf: m < 0");
  int width = 40 + 4 * m;
  for (;;) {
    WalkPmf w;
    w.lo = -width;
    std::vector<double> f(static_cast<std::size_t>(width) + 1, 0.0);
    f[static_cast<std::size_t>(width)] = 1.0;  // S_0 = 0
    double lost = 0;
    for (int k = 0; k < m; ++k) f = walk_step(f, &lost);
    w.pmf = std::move(f);
    w.lost_mass = lost;
    if (lost < tail_tol) return w;
    width *= 2;
  }
}

double t_power_exact(int m, long x, long y) {
  if (m == 0) return x == y ? 1.0 : 0.0;
  cpp_int tot = 0;
  cpp_int b1 = 1;  // C(m, a)
  for (long a = 0; a <= m; ++a) {
    if (a > 0) b1 = b1 * (m - a + 1) / a;
    long top = x + a - y;
    if (top < 0) continue;
    cpp_int b2 = 1;  // C(top + m - 1, m - 1)
    for (long i = 0; i < m - 1; ++i) b2 = b2 * (top + m - 1 - i) / (i + 1);
    tot += b1 * b2;
  }
  return tot.convert_to<double>();
}

TPower t_power_pmf(int m, long d) {
  TPower r;
  if (m == 0) {
    r.prob = d == 0 ? 1.0 : 0.0;
    r.weight = r.prob;
    return r;
  }
  WalkPmf w = walk_pmf(m);
  r.prob = w.at(d);
  r.weight = std::pow(kSilver, double(2 * m - d)) * r.prob;
  return r;
}

BridgeResult bridge_stay_below(int m, long start, long end, const std::vector<long>& caps) {
  if (static_cast<int>(caps.size()) != m + 1)
    throw std::invalid_argument("bridge_stay_below: caps must have m+1 entries");
  BridgeResult res;
  // Positions at step k lie in [end - (m-k), start + k]; below that the bridge cannot finish.
  auto lo_at = [&](int k) { return end - (m - k); };
  auto hi_at = [&](int k) { return start + k; };
  if (end - start > m) {
    res.degenerate = true;
    return res;
  }
  auto run = [&](bool capped) {
    std::vector<double> f(1, 1.0);
    long lo = start;
    if (capped && start > caps[0]) return 0.0;
    for (int k = 1; k <= m; ++k) {
      // Extend f downwards to the new lower bound before stepping.
      // One extra slot: X2 can pass through lo_at(k) - 1 before X1 lifts it back.
      long nlo = std::min(lo, lo_at(k) - 1);
      std::vector<double> g(static_cast<std::size_t>(lo - nlo), 0.0);
      g.insert(g.end(), f.begin(), f.end());
      auto h = walk_step(g);
      // h indexed from nlo, covering [nlo, hi+1]
      long keep_lo = lo_at(k), keep_hi = hi_at(k);
      if (capped) keep_hi = std::min(keep_hi, caps[k]);
      std::vector<double> nf;
      if (keep_hi >= keep_lo) {
        for (long v = keep_lo; v <= keep_hi; ++v) {
          long i = v - nlo;
          nf.push_back(i < static_cast<long>(h.size()) ? h[static_cast<std::size_t>(i)] : 0.0);
        }
      } else {
        return 0.0;
      }
      f.swap(nf);
      lo = keep_lo;
    }
    long i = end - lo;
    return (i >= 0 && i < static_cast<long>(f.size())) ? f[static_cast<std::size_t>(i)] : 0.0;
  };
  res.free_bridge = run(false);
  res.capped_joint = run(true);
  if (res.free_bridge <= 0) {
    res.degenerate = true;
    return res;
  }
  res.probability = std::clamp(res.capped_joint / res.free_bridge, 0.0, 1.0);
  return res;
}

double FirstPassage::hit_mass() const {
  double s = 0;
  for (const auto& h : hits) s += h.p;
  return s;
}

FirstPassage first_passage_dp(long u, int m0, const std::vector<long>& caps) {
  FirstPassage fp;
  const int K = static_cast<int>(caps.size());
  if (K == 0) {
    fp.survival = 1;
    return fp;
  }
  if (u > caps[0]) {
    fp.hits.push_back({m0, u, 1.0});
    return fp;
  }
  // reach[k]: smallest value at step k from which some later cap can still be exceeded.
  std::vector<long> reach(K, kNoCapL);
  for (int k = K - 1; k >= 0; --k) {
    long here = caps[k] >= kNoCapL ? kNoCapL : caps[k] + 1;
    long later = (k + 1 < K && reach[k + 1] < kNoCapL) ? reach[k + 1] - 1 : kNoCapL;
    reach[k] = std::min(here, later);
  }
  std::vector<double> f(1, 1.0);
  long lo = u;
  double lost = 0;
  if (u < reach[0]) {
    fp.survival = 1;
    return fp;
  }
  for (int k = 1; k < K && !f.empty(); ++k) {
    // Pad downwards so that values in [reach[k], lo) and the X2 midpoint below are kept.
    long nlo = std::min(lo, reach[k] >= kNoCapL ? lo : reach[k] - 1);
    std::vector<double> g(static_cast<std::size_t>(lo - nlo), 0.0);
    g.insert(g.end(), f.begin(), f.end());
    auto h = walk_step(g, &lost);
    long keep_lo = reach[k];
    std::vector<double> nf;
    for (std::size_t i = 0; i < h.size(); ++i) {
      long v = nlo + static_cast<long>(i);
      if (caps[k] < kNoCapL && v > caps[k]) {
        if (h[i] != 0) fp.hits.push_back({m0 + k, v, h[i]});
      } else if (v < keep_lo) {
        lost += h[i];
      } else {
        nf.push_back(h[i]);
      }
    }
    f.swap(nf);
    lo = keep_lo;
  }
  double alive = 0;
  for (double v : f) alive += v;
  fp.survival = alive + lost;
  return fp;
}

double rate_I(double x) {
  if (x > 1) return std::numeric_limits<double>::infinity();
  const double a = std::log(kSilver);
  if (x == 1) return a;
  double s = std::sqrt(1 + (1 - x) * (1 - x));
  return (2 - x) * a + (1 - x) * std::log((1 - x) / (1 + s)) + std::log((x + s) / (2 - x + s));
}

double rate_I_legendre(double x) {
  auto neg = [x](double u) {
    double m1 = (kWalkP + std::exp(u)) / kSqrt2;
    double m2 = (2 - kSqrt2) / (1 - kWalkP * std::exp(-u));
    return -(u * x - std::log(m1 * m2));
  };
  auto r = boost::math::tools::brent_find_minima(neg, 1e-12, 60.0, 60);
  return -r.second;
}

double ldp_bound(int m, double x) { return std::exp(-m * rate_I(x)); }

double ldp_quadratic_bound(int m, double x, double eps) { return std::exp(-eps * m * x * x); }

double rate_epsilon(int grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid; ++i) {
    double x = double(i) / grid;
    best = std::min(best, rate_I(x) / (x * x));
  }
  return best;
}

}  // namespace aztec
