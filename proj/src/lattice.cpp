#include "aztec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

namespace aztec {

AztecDomain::AztecDomain(int n) : n_(n) {
  if (n < 0) throw DomainError("Aztec order must be nonnegative");
}

bool AztecDomain::contains(int k, int l) const {
  if (k < -n_ || k >= n_ || l < -n_ || l >= n_) return false;
  int ax = k >= 0 ? k + 1 : -k;
  int ay = l >= 0 ? l + 1 : -l;
  return ax + ay <= n_ + 1;
}

bool AztecDomain::is_white(int k, int l) const {
  int p = (k + l - n_) % 2;
  if (p < 0) p += 2;
  return p == kWhiteParity;
}

std::size_t AztecDomain::index(int k, int l) const {
  return static_cast<std::size_t>(k + n_) * (2 * n_) + static_cast<std::size_t>(l + n_);
}

std::vector<Square> AztecDomain::squares() const {
  std::vector<Square> out;
  out.reserve(square_count());
  for (int l = n_ - 1; l >= -n_; --l)
    for (int k = -n_; k < n_; ++k)
      if (contains(k, l)) out.push_back({k, l});
  return out;
}

const char* class_name(DominoClass c) {
  switch (c) {
    case DominoClass::N: return "N";
    case DominoClass::S: return "S";
    case DominoClass::W: return "W";
    case DominoClass::E: return "E";
  }
  return "?";
}

DominoClass classify_domino(const Domino& d, const AztecDomain& dom) {
  auto a = d.first(), b = d.second();
  if (!dom.contains(a.k, a.l) || !dom.contains(b.k, b.l))
    throw DomainError("domino outside the Aztec diamond");
  if (d.orient == Orientation::Horizontal)
    return dom.is_white(d.x, d.y) ? DominoClass::N : DominoClass::S;
  return dom.is_white(d.x, d.y + 1) ? DominoClass::W : DominoClass::E;
}

ValidationReport validate_tiling(const Tiling& t) {
  ValidationReport rep;
  AztecDomain dom(t.n);
  rep.expected_count = static_cast<std::size_t>(t.n) * (t.n + 1);
  rep.actual_count = t.dominoes.size();
  std::vector<int> cover(4ull * t.n * t.n, 0);
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    const auto& d = t.dominoes[i];
    auto a = d.first(), b = d.second();
    if (!dom.contains(a.k, a.l) || !dom.contains(b.k, b.l)) {
      rep.outside.push_back(i);
      continue;
    }
    ++cover[dom.index(a.k, a.l)];
    ++cover[dom.index(b.k, b.l)];
  }
  for (auto s : dom.squares()) {
    int c = cover[dom.index(s.k, s.l)];
    if (c == 0) rep.uncovered.push_back(s);
    if (c > 1) rep.doubly_covered.push_back(s);
  }
  rep.ok = rep.uncovered.empty() && rep.doubly_covered.empty() && rep.outside.empty() &&
           rep.actual_count == rep.expected_count;
  return rep;
}

namespace {

using Pt = std::pair<int, int>;

// Segment of a non-N domino in doubled coordinates; returns false for N.
bool domino_segment(const Domino& d, DominoClass c, Pt& from, Pt& to) {
  int k2 = 2 * d.x, l2 = 2 * d.y;
  switch (c) {
    case DominoClass::S: from = {k2, l2 + 1}; to = {k2 + 4, l2 + 1}; return true;
    case DominoClass::W: from = {k2, l2 + 1}; to = {k2 + 2, l2 + 3}; return true;
    case DominoClass::E: from = {k2, l2 + 3}; to = {k2 + 2, l2 + 1}; return true;
    case DominoClass::N: return false;
  }
  return false;
}

}  // namespace

LineEnsemble tiling_to_lines(const Tiling& t) {
  AztecDomain dom(t.n);
  std::map<Pt, Pt> next;
  std::map<Pt, int> indeg;
  LineEnsemble le;
  le.n = t.n;
  for (const auto& d : t.dominoes) {
    Pt a, b;
    if (!domino_segment(d, classify_domino(d, dom), a, b)) continue;
    if (!next.emplace(a, b).second) throw InvariantError("two segments start at one point");
    ++indeg[b];
    ++le.segment_count;
  }
  // Paths start at left-boundary points with no incoming segment.
  std::vector<Pt> starts;
  for (auto& [a, b] : next)
    if (!indeg.count(a)) starts.push_back(a);
  // Top path first: order by starting height, descending.
  std::sort(starts.begin(), starts.end(), [](const Pt& p, const Pt& q) {
    return p.second != q.second ? p.second > q.second : p.first < q.first;
  });
  std::size_t used = 0;
  for (auto s : starts) {
    LinePath path;
    Pt p = s;
    path.pts2.push_back(p);
    for (auto it = next.find(p); it != next.end(); it = next.find(p)) {
      p = it->second;
      path.pts2.push_back(p);
      ++used;
    }
    le.paths.push_back(std::move(path));
  }
  if (used != le.segment_count) throw InvariantError("segments do not concatenate into paths");
  le.top = top_curve(t);
  return le;
}

TopCurveX top_curve(const Tiling& t) {
  AztecDomain dom(t.n);
  const int n = t.n;
  std::map<Pt, Pt> next;
  for (const auto& d : t.dominoes) {
    Pt a, b;
    if (domino_segment(d, classify_domino(d, dom), a, b)) next[a] = b;
  }
  TopCurveX x;
  x.n = n;
  x.x.assign(2 * n + 1, -1);
  Pt p{-2 * n, -1};
  x.x[0] = 0;
  while (p.first < 2 * n) {
    auto it = next.find(p);
    if (it == next.end()) throw InvariantError("top path broken");
    Pt q = it->second;
    if (q.first - p.first == 4) x.x[static_cast<std::size_t>(p.first / 2 + 1 + n)] = (p.second + 1) / 2;
    x.x[static_cast<std::size_t>(q.first / 2 + n)] = (q.second + 1) / 2;
    p = q;
  }
  if (p != Pt{2 * n, -1}) throw InvariantError("top path does not end at (n,-1/2)");
  return x;
}

TopCurveY x_to_y(const TopCurveX& x, int n) {
  if (x.n != n || static_cast<int>(x.x.size()) != 2 * n + 1)
    throw InvariantError("malformed top curve");
  const int big = std::numeric_limits<int>::max();
  TopCurveY y;
  y.n = n;
  y.y.assign(2 * n + 1, big);
  auto put = [&](int s, int v) {
    if (s < 0 || s > 2 * n) throw InvariantError("curve point maps outside [0,2n]");
    y.y[s] = std::min(y.y[s], v);
  };
  for (int t = -n; t <= n; ++t) {
    int xv = x.at(t);
    if (xv < 0) throw InvariantError("negative height in top curve");
    put(t + xv + n, xv);
    if (t < n) {
      int d = x.at(t + 1) - xv;
      if (d < -1 || d > 1) throw InvariantError("top curve jumps by more than one");
      if (d == 1) put(t + xv + n + 1, xv + 1);
    }
  }
  for (int s = 0; s <= 2 * n; ++s)
    if (y.y[s] == big) throw InvariantError("Y undefined at some time");
  return y;
}

bool y_step_law_ok(const TopCurveY& y) {
  if (y.y.front() != 0 || y.y.back() != 0) return false;
  for (int s = 0; s + 1 <= 2 * y.n; ++s) {
    int d = y.y[s + 1] - y.y[s];
    if (s % 2 == 0) {
      if (d < 0 || d > 1) return false;
    } else if (d > 0) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> north_polar_region(const Tiling& t) {
  AztecDomain dom(t.n);
  const int n = t.n;
  std::vector<long> owner(4ull * n * n, -1);
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    auto a = t.dominoes[i].first(), b = t.dominoes[i].second();
    owner[dom.index(a.k, a.l)] = static_cast<long>(i);
    owner[dom.index(b.k, b.l)] = static_cast<long>(i);
  }
  auto is_north = [&](long i) {
    return i >= 0 && classify_domino(t.dominoes[i], dom) == DominoClass::N;
  };
  std::vector<std::size_t> out;
  if (n == 0) return out;
  long top = owner[dom.index(-1, n - 1)];
  if (!is_north(top)) return out;
  std::vector<char> seen(t.dominoes.size(), 0);
  std::queue<long> q;
  q.push(top);
  seen[top] = 1;
  const int dk[4] = {1, -1, 0, 0}, dl[4] = {0, 0, 1, -1};
  while (!q.empty()) {
    long i = q.front();
    q.pop();
    out.push_back(static_cast<std::size_t>(i));
    for (auto s : {t.dominoes[i].first(), t.dominoes[i].second()}) {
      for (int e = 0; e < 4; ++e) {
        int k = s.k + dk[e], l = s.l + dl[e];
        if (!dom.contains(k, l)) continue;
        long j = owner[dom.index(k, l)];
        if (!seen[j] && is_north(j)) {
          seen[j] = 1;
          q.push(j);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool north_polar_region_ok(const Tiling& t, const TopCurveX& top) {
  AztecDomain dom(t.n);
  auto region = north_polar_region(t);
  bool touches = false;
  for (auto i : region) {
    const auto& d = t.dominoes[i];
    for (auto s : {d.first(), d.second()}) {
      if (!dom.contains(s.k, s.l + 1)) touches = true;
      // Square centre lies above the top curve at both bounding columns.
      double yc = s.l + 0.5;
      if (yc <= top.height(s.k) || yc <= top.height(s.k + 1)) return false;
    }
  }
  return region.empty() || touches;
}

// ---------------------------------------------------------------- barriers

double BarrierSpec::value(double t) const {
  double v = kInf;
  for (const auto& p : pieces)
    if (t >= p.a && t <= p.b) v = std::min(v, p.g(t));
  if (pinned && (t < t1 || t > t2)) v = std::min(v, R + t * t);
  return v;
}

std::vector<double> BarrierSpec::breakpoints() const {
  std::vector<double> out;
  for (const auto& p : pieces) {
    out.push_back(p.a);
    out.push_back(p.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool BarrierSpec::finite_on(double lo, double hi) const {
  // Covered iff the union of pieces contains [lo,hi].
  std::vector<std::pair<double, double>> iv;
  for (const auto& p : pieces) iv.push_back({p.a, p.b});
  std::sort(iv.begin(), iv.end());
  double reach = lo;
  for (auto [a, b] : iv) {
    if (a > reach) break;
    reach = std::max(reach, b);
  }
  return reach >= hi;
}

void BarrierSpec::check() const {
  for (const auto& p : pieces) {
    if (!(p.a <= p.b)) throw DomainError("barrier piece with a > b");
    if (!p.g) throw DomainError("barrier piece without a function");
  }
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      const auto &p = pieces[i], &q = pieces[j];
      if (std::max(p.a, q.a) < std::min(p.b, q.b)) throw DomainError("overlapping barrier pieces");
    }
}

BarrierSpec BarrierSpec::none() { return {}; }

BarrierSpec BarrierSpec::parabola(double R, double L, double M) {
  BarrierSpec s;
  s.pieces.push_back({L, M, [R](double t) { return R + t * t; }});
  return s;
}

BarrierSpec BarrierSpec::point(double t0, double value) {
  BarrierSpec s;
  s.pieces.push_back({t0, t0, [value](double) { return value; }});
  return s;
}

BarrierSpec BarrierSpec::function(double L, double M, std::function<double(double)> g) {
  BarrierSpec s;
  s.pieces.push_back({L, M, std::move(g)});
  return s;
}

BarrierSpec BarrierSpec::step_down(double R, double drop, double t0, double L, double M) {
  BarrierSpec s;
  s.pieces.push_back({L, t0, [R](double t) { return R + t * t; }});
  s.pieces.push_back({t0, M, [R, drop](double t) { return R - drop + t * t; }});
  return s;
}

BarrierSpec BarrierSpec::v_shape(double c, double slope, double L, double M) {
  BarrierSpec s;
  s.pieces.push_back({L, 0.0, [c, slope](double t) { return c - slope * t; }});
  s.pieces.push_back({0.0, M, [c, slope](double t) { return c + slope * t; }});
  return s;
}

BarrierSpec BarrierSpec::parabola_with_point(double R, double u, double t0, double L, double M) {
  BarrierSpec s;
  s.pieces.push_back({L, M, [R](double t) { return R + t * t; }});
  s.pieces.push_back({t0, t0, [u](double t) { return u + t * t; }});
  s.pinned = true;
  s.R = R;
  s.t1 = L;
  s.t2 = M;
  return s;
}

// ---------------------------------------------------------------- scaling

double ScalingMap::r() const {
  return n / std::sqrt(2.0) + std::pow(2.0, -5.0 / 6.0) * R * std::cbrt(double(n));
}

double ScalingMap::b_real(double tau) const {
  return n * (1.0 + 1.0 / std::sqrt(2.0)) + std::pow(2.0, -1.0 / 6.0) * tau * std::pow(double(n), 2.0 / 3.0);
}

int ScalingMap::b_even(double tau) const {
  double h = b_real(tau) / 2.0;
  double f = std::floor(h);
  double k = (h - f >= 0.5) ? f + 1 : f;
  return 2 * static_cast<int>(k);
}

double ScalingMap::tau_of_time(double s) const {
  return (s - n * (1.0 + 1.0 / std::sqrt(2.0))) / (std::pow(2.0, -1.0 / 6.0) * std::pow(double(n), 2.0 / 3.0));
}

double ScalingMap::g_n(double tau, double gval) const {
  return n / std::sqrt(2.0) + std::pow(2.0, -5.0 / 6.0) * (gval - tau * tau) * std::cbrt(double(n));
}

int ScalingMap::cap_x() const { return static_cast<int>(std::floor(r() + 0.5)); }

ScaledBarrierPoint scale_time_barrier(const ScalingMap& s, double tau, const BarrierSpec& g) {
  ScaledBarrierPoint p;
  p.time = s.b_even(tau);
  double v = g.value(tau);
  if (std::isinf(v)) return p;
  p.constrained = true;
  p.g_n = s.g_n(tau, v);
  return p;
}

DiscreteBarrier discretize_barrier(int n, const BarrierSpec& g, double L, double M) {
  ScalingMap sm{n, 0.0};
  DiscreteBarrier db;
  db.m0 = sm.b_even(L) / 2;
  db.m1 = sm.b_even(M) / 2;
  if (db.m0 < 1 || db.m1 > n - 1 || db.m0 > db.m1) {
    std::ostringstream os;
    os << "window [" << L << "," << M << "] maps to times outside [2," << 2 * n - 2 << "]";
    throw DomainError(os.str());
  }
  db.caps.assign(db.m1 - db.m0 + 1, kNoCap);
  for (const auto& p : g.pieces) {
    int la = sm.b_even(p.a) / 2, lb = sm.b_even(p.b) / 2;
    for (int l = std::max(la, db.m0); l <= std::min(lb, db.m1); ++l) {
      double tau = std::clamp(sm.tau_of_time(2.0 * l), p.a, p.b);
      double gv = p.g(tau);
      if (std::isinf(gv)) continue;
      double c = std::floor(sm.g_n(tau, gv));
      int ci = c < -4.0 * n ? -4 * n : static_cast<int>(c);
      db.caps[l - db.m0] = std::min(db.caps[l - db.m0], ci);
    }
  }
  return db;
}

double rescale_X(const TopCurveX& curve, double /*R*/, int n, double t) {
  double T = std::pow(2.0, -1.0 / 6.0) * t * std::pow(double(n), 2.0 / 3.0);
  long ti = std::lround(T);
  if (ti < -n || ti > n) throw DomainError("rescaled time outside [-n, n]");
  double X = curve.height(static_cast<int>(ti));
  return (X - n / std::sqrt(2.0)) / (std::pow(2.0, -5.0 / 6.0) * std::cbrt(double(n)));
}

}  // namespace aztec
