#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aztec {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rule {
  std::vector<double> x, w;
  std::size_t size() const { return x.size(); }
  void append(const Rule& r);
};

// Gauss-Legendre rule with n nodes on [-1, 1] (cached).
const Rule& gauss_legendre(int n);
Rule gl_interval(double a, double b, int n);
// Panels no wider than h on [a, b], always splitting at the given interior breakpoints.
Rule composite(double a, double b, double h, int n, std::vector<double> breaks = {});

// det(I - W^{1/2} K W^{1/2}) for K sampled on the nodes of r.
double nystrom_det(const Eigen::MatrixXd& K, const Rule& r);
// Same for rows and columns carrying their own weights already folded in.
double det_one_minus(const Eigen::MatrixXd& K);

struct FredholmResult {
  double value = 0;
  double raw = 0;
  double error_estimate = 0;
  int nodes = 0;
  double x_max = 0;
  int slices = 0;
  bool clamped = false;
  std::string route;
};

// Clamps to [0, 1], recording whether the raw value left [-1e-10, 1 + 1e-10].
FredholmResult finalize(double raw, double err, int nodes, double x_max, std::string route);

// Kernel evaluated on a tensor grid: K(x_i, x_j).
using KernelFn = std::function<double(double, double)>;
Eigen::MatrixXd sample_kernel(const KernelFn& k, const Rule& r);

}  // namespace aztec
