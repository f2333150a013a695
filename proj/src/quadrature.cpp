#include "aztec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace aztec {

void Rule::append(const Rule& r) {
  x.insert(x.end(), r.x.begin(), r.x.end());
  w.insert(w.end(), r.w.begin(), r.w.end());
}

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev guess.
    long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      long double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (z * p1 - p0) / (z * z - 1);
      long double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    long double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1);
    r.x[n - 1 - i] = static_cast<double>(z);
    r.w[n - 1 - i] = static_cast<double>(2 / ((1 - z * z) * dp * dp));
  }
  return cache.emplace(n, std::move(r)).first->second;
}

Rule gl_interval(double a, double b, int n) {
  const Rule& g = gauss_legendre(n);
  Rule r;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x.push_back(c + h * g.x[i]);
    r.w.push_back(h * g.w[i]);
  }
  return r;
}

Rule composite(double a, double b, double h, int n, std::vector<double> breaks) {
  Rule r;
  if (!(b > a)) return r;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> pts;
  for (double v : breaks)
    if (v >= a && v <= b && (pts.empty() || v > pts.back() + 1e-14)) pts.push_back(v);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double len = pts[i + 1] - pts[i];
    int m = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
    for (int j = 0; j < m; ++j) r.append(gl_interval(pts[i] + len * j / m, pts[i] + len * (j + 1) / m, n));
  }
  return r;
}

double det_one_minus(const Eigen::MatrixXd& K) {
  if (K.rows() == 0) return 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(K.rows(), K.cols()) - K;
  return A.partialPivLu().determinant();
}

double nystrom_det(const Eigen::MatrixXd& K, const Rule& r) {
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(r.w[i]);
  Eigen::MatrixXd A = s.asDiagonal() * K * s.asDiagonal();
  return det_one_minus(A);
}

FredholmResult finalize(double raw, double err, int nodes, double x_max, std::string route) {
  FredholmResult f;
  f.raw = raw;
  f.value = std::clamp(raw, 0.0, 1.0);
  f.clamped = raw < -1e-10 || raw > 1 + 1e-10;
  f.error_estimate = err;
  f.nodes = nodes;
  f.x_max = x_max;
  f.route = std::move(route);
  return f;
}

Eigen::MatrixXd sample_kernel(const KernelFn& k, const Rule& r) {
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) K(i, j) = k(r.x[i], r.x[j]);
  return K;
}

}  // namespace aztec
