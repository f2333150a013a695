#include "aztec/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aztec {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  std::uint64_t t = stream ^ a;
  eng_.seed(splitmix64(t));
}

std::uint64_t RngStream::below(std::uint64_t m) {
  // Rejection for exact uniformity.
  std::uint64_t lim = (~0ULL) - ((~0ULL) % m);
  std::uint64_t v;
  do v = eng_();
  while (v >= lim);
  return v % m;
}

int RestrictionParams::cap(int n) const {
  if (std::isinf(R) && R > 0) return std::numeric_limits<int>::max() / 2;
  return ScalingMap{n, R}.cap_x();
}

bool satisfies_restriction(const TopCurveX& x, int cap) {
  return *std::max_element(x.x.begin(), x.x.end()) <= cap;
}

namespace {

struct Grid {
  int n;
  std::vector<int> cell;  // domino id or -1
  explicit Grid(int n_) : n(n_), cell(4ull * n_ * n_, -1) {}
  int& at(int k, int l) { return cell[static_cast<std::size_t>(k + n) * (2 * n) + (l + n)]; }
};

}  // namespace

namespace {

Tiling grow_unchecked(const Tiling& t, RngStream& rng) {
  const int n = t.n, m = n + 1;
  AztecDomain dom(n), dom2(m);

  Grid g(std::max(n, 1));
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    auto a = t.dominoes[i].first(), b = t.dominoes[i].second();
    g.at(a.k, a.l) = g.at(b.k, b.l) = static_cast<int>(i);
  }
  std::vector<DominoClass> cls(t.dominoes.size());
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) cls[i] = classify_domino(t.dominoes[i], dom);

  std::vector<char> dead(t.dominoes.size(), 0);
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    const auto& d = t.dominoes[i];
    if (cls[i] == DominoClass::N && dom.contains(d.x, d.y + 1)) {
      int j = g.at(d.x, d.y + 1);
      const auto& e = t.dominoes[j];
      if (cls[j] == DominoClass::S && e.x == d.x && e.y == d.y + 1) dead[i] = dead[j] = 1;
    } else if (cls[i] == DominoClass::E && dom.contains(d.x + 1, d.y)) {
      int j = g.at(d.x + 1, d.y);
      const auto& e = t.dominoes[j];
      if (cls[j] == DominoClass::W && e.x == d.x + 1 && e.y == d.y) dead[i] = dead[j] = 1;
    }
  }

  Tiling out;
  out.n = m;
  out.dominoes.reserve(static_cast<std::size_t>(m) * (m + 1));
  Grid h(m);
  auto place = [&](Domino d) {
    auto a = d.first(), b = d.second();
    if (!dom2.contains(a.k, a.l) || !dom2.contains(b.k, b.l) || h.at(a.k, a.l) >= 0 ||
        h.at(b.k, b.l) >= 0)
      throw InvariantError("shuffle_grow: collision while sliding");
    int id = static_cast<int>(out.dominoes.size());
    h.at(a.k, a.l) = h.at(b.k, b.l) = id;
    out.dominoes.push_back(d);
  };
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    if (dead[i]) continue;
    Domino d = t.dominoes[i];
    switch (cls[i]) {
      case DominoClass::N: ++d.y; break;
      case DominoClass::S: --d.y; break;
      case DominoClass::E: ++d.x; break;
      case DominoClass::W: --d.x; break;
    }
    place(d);
  }
  for (int l = m - 1; l >= -m; --l)
    for (int k = -m; k < m; ++k) {
      if (!dom2.contains(k, l) || h.at(k, l) >= 0) continue;
      if (!dom2.contains(k + 1, l) || !dom2.contains(k, l - 1) || h.at(k + 1, l) >= 0 ||
          h.at(k, l - 1) >= 0 || h.at(k + 1, l - 1) >= 0)
        throw InvariantError("shuffle_grow: hole is not a 2x2 block");
      if (rng.coin()) {
        place({k, l, Orientation::Horizontal});
        place({k, l - 1, Orientation::Horizontal});
      } else {
        place({k, l - 1, Orientation::Vertical});
        place({k + 1, l - 1, Orientation::Vertical});
      }
    }
  return out;
}

}  // namespace

Tiling shuffle_grow(const Tiling& t, RngStream& rng) {
  if (!validate_tiling(t).ok) throw DomainError("shuffle_grow: invalid input tiling");
  return grow_unchecked(t, rng);
}

Tiling sample_uniform(int n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_uniform needs n >= 1");
  Tiling t;
  t.n = 0;
  for (int k = 0; k < n; ++k) t = grow_unchecked(t, rng);
  if (!validate_tiling(t).ok) throw InvariantError("sample_uniform produced an invalid tiling");
  return t;
}

RestrictedSample sample_restricted(int n, const RestrictionParams& p, RngStream& rng,
                                   std::uint64_t budget) {
  RestrictedSample out;
  int cap = p.cap(n);
  while (out.attempts < budget) {
    ++out.attempts;
    Tiling t = sample_uniform(n, rng);
    if (satisfies_restriction(top_curve(t), cap)) {
      out.tiling = std::move(t);
      out.accepted = true;
      return out;
    }
  }
  return out;
}

std::vector<Tiling> enumerate_tilings(int n) {
  if (n < 1 || n > 4) throw DomainError("enumerate_tilings supports 1 <= n <= 4");
  AztecDomain dom(n);
  auto sq = dom.squares();
  std::vector<char> cov(4ull * n * n, 0);
  std::vector<Tiling> out;
  Tiling cur;
  cur.n = n;
  auto idx = [&](int k, int l) { return dom.index(k, l); };
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    std::size_t i = from;
    while (i < sq.size() && cov[idx(sq[i].k, sq[i].l)]) ++i;
    if (i == sq.size()) {
      out.push_back(cur);
      return;
    }
    int k = sq[i].k, l = sq[i].l;
    cov[idx(k, l)] = 1;
    if (dom.contains(k + 1, l) && !cov[idx(k + 1, l)]) {
      cov[idx(k + 1, l)] = 1;
      cur.dominoes.push_back({k, l, Orientation::Horizontal});
      rec(i + 1);
      cur.dominoes.pop_back();
      cov[idx(k + 1, l)] = 0;
    }
    if (dom.contains(k, l - 1) && !cov[idx(k, l - 1)]) {
      cov[idx(k, l - 1)] = 1;
      cur.dominoes.push_back({k, l - 1, Orientation::Vertical});
      rec(i + 1);
      cur.dominoes.pop_back();
      cov[idx(k, l - 1)] = 0;
    }
    cov[idx(k, l)] = 0;
  };
  rec(0);
  return out;
}

std::string tiling_key(const Tiling& t) {
  std::vector<std::tuple<int, int, int>> v;
  for (const auto& d : t.dominoes) v.emplace_back(d.x, d.y, d.orient == Orientation::Vertical);
  std::sort(v.begin(), v.end());
  std::ostringstream os;
  for (auto [x, y, o] : v) os << x << ',' << y << (o ? 'v' : 'h') << ';';
  return os.str();
}

bool mcmc_rotation_step(Tiling& t, const std::optional<RestrictionParams>& restriction,
                        RngStream& rng) {
  const int n = t.n;
  AztecDomain dom(n);
  // Candidate blocks: lower-left (k,l) with all four squares in the domain.
  std::vector<Square> blocks;
  for (int k = -n; k < n; ++k)
    for (int l = -n; l < n; ++l)
      if (dom.contains(k, l) && dom.contains(k + 1, l) && dom.contains(k, l + 1) &&
          dom.contains(k + 1, l + 1))
        blocks.push_back({k, l});
  if (blocks.empty()) return false;
  Square b = blocks[rng.below(blocks.size())];
  long ih0 = -1, ih1 = -1, iv0 = -1, iv1 = -1;
  for (std::size_t i = 0; i < t.dominoes.size(); ++i) {
    const auto& d = t.dominoes[i];
    if (d.orient == Orientation::Horizontal && d.x == b.k && d.y == b.l) ih0 = long(i);
    if (d.orient == Orientation::Horizontal && d.x == b.k && d.y == b.l + 1) ih1 = long(i);
    if (d.orient == Orientation::Vertical && d.x == b.k && d.y == b.l) iv0 = long(i);
    if (d.orient == Orientation::Vertical && d.x == b.k + 1 && d.y == b.l) iv1 = long(i);
  }
  Tiling prop = t;
  if (ih0 >= 0 && ih1 >= 0) {
    prop.dominoes[ih0] = {b.k, b.l, Orientation::Vertical};
    prop.dominoes[ih1] = {b.k + 1, b.l, Orientation::Vertical};
  } else if (iv0 >= 0 && iv1 >= 0) {
    prop.dominoes[iv0] = {b.k, b.l, Orientation::Horizontal};
    prop.dominoes[iv1] = {b.k, b.l + 1, Orientation::Horizontal};
  } else {
    return false;
  }
  if (restriction && !satisfies_restriction(top_curve(prop), restriction->cap(n))) return false;
  t = std::move(prop);
  return true;
}

}  // namespace aztec
