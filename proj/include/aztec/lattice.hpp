#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aztec {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square [k,k+1]x[l,l+1] is white iff (k + l - n) is even. With this choice the
// leftmost square of every row in the top half is white.
inline constexpr int kWhiteParity = 0;

struct Square {
  int k = 0;
  int l = 0;
  bool operator==(const Square&) const = default;
};

class AztecDomain {
 public:
  explicit AztecDomain(int n);
  int n() const { return n_; }
  bool contains(int k, int l) const;
  bool is_white(int k, int l) const;
  std::size_t square_count() const { return 2ull * n_ * (n_ + 1); }
  // Dense index of a square inside the bounding box [-n, n-1]^2.
  std::size_t index(int k, int l) const;
  std::vector<Square> squares() const;

 private:
  int n_;
};

enum class Orientation : std::uint8_t { Horizontal, Vertical };
enum class DominoClass : std::uint8_t { N, S, W, E };

const char* class_name(DominoClass c);

struct Domino {
  int x = 0;  // lower-left corner
  int y = 0;
  Orientation orient = Orientation::Horizontal;
  bool operator==(const Domino&) const = default;
  Square first() const { return {x, y}; }
  Square second() const {
    return orient == Orientation::Horizontal ? Square{x + 1, y} : Square{x, y + 1};
  }
};

DominoClass classify_domino(const Domino& d, const AztecDomain& dom);

struct Tiling {
  int n = 0;
  std::vector<Domino> dominoes;
};

struct ValidationReport {
  bool ok = true;
  std::size_t expected_count = 0;
  std::size_t actual_count = 0;
  std::vector<Square> uncovered;
  std::vector<Square> doubly_covered;
  std::vector<std::size_t> outside;  // indices of dominoes not inside the domain
};

ValidationReport validate_tiling(const Tiling& t);

// Top curve X: x[t+n] is the integer with X(t) = x - 1/2, t in {-n..n}.
struct TopCurveX {
  int n = 0;
  std::vector<int> x;
  int at(int t) const { return x.at(static_cast<std::size_t>(t + n)); }
  double height(int t) const { return at(t) - 0.5; }
};

// Y: y[s] for s in {0..2n}. At even s the post-drop (minimum) value is stored.
struct TopCurveY {
  int n = 0;
  std::vector<int> y;
  int at(int s) const { return y.at(static_cast<std::size_t>(s)); }
};

// A lattice path in doubled coordinates: points (2*x, 2*y).
struct LinePath {
  std::vector<std::pair<int, int>> pts2;
};

struct LineEnsemble {
  int n = 0;
  std::vector<LinePath> paths;  // paths[0] is the top path
  std::size_t segment_count = 0;
  TopCurveX top;
};

LineEnsemble tiling_to_lines(const Tiling& t);
TopCurveX top_curve(const Tiling& t);
TopCurveY x_to_y(const TopCurveX& x, int n);
bool y_step_law_ok(const TopCurveY& y);

// Indices of the N dominoes in the connected N-cluster touching the top corner.
std::vector<std::size_t> north_polar_region(const Tiling& t);
// Checks that the polar cluster is connected, touches the boundary and lies above the top curve.
bool north_polar_region_ok(const Tiling& t, const TopCurveX& top);

// Piece of a barrier: g on [a,b]. a == b encodes a single-time constraint.
struct BarrierPiece {
  double a = 0;
  double b = 0;
  std::function<double(double)> g;
};

struct BarrierSpec {
  std::vector<BarrierPiece> pieces;
  // Parabola-pinned form: g(t) = R + t^2 outside [t1, t2].
  bool pinned = false;
  double R = 0;
  double t1 = 0;
  double t2 = 0;

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // Minimum over all pieces containing t (closed intervals); +inf if none.
  double value(double t) const;
  // Sorted, de-duplicated piece endpoints.
  std::vector<double> breakpoints() const;
  bool finite_on(double lo, double hi) const;
  void check() const;

  static BarrierSpec none();
  static BarrierSpec parabola(double R, double L, double M);
  static BarrierSpec point(double t0, double value);
  static BarrierSpec function(double L, double M, std::function<double(double)> g);
  // R + t^2 on [L, t0) and R - drop + t^2 on [t0, M].
  static BarrierSpec step_down(double R, double drop, double t0, double L, double M);
  // c + slope*|t| on [L, M].
  static BarrierSpec v_shape(double c, double slope, double L, double M);
  // R + t^2 on [L,M] except the single time t0 where the value is u + t0^2.
  static BarrierSpec parabola_with_point(double R, double u, double t0, double L, double M);
};

struct ScalingMap {
  int n = 1;
  double R = 0;

  double r() const;
  double b_real(double tau) const;
  // Nearest even integer, ties going to the larger one.
  int b_even(double tau) const;
  double tau_of_time(double s) const;
  double g_n(double tau, double gval) const;
  // Largest integer x with X = x - 1/2 <= r.
  int cap_x() const;
};

struct ScaledBarrierPoint {
  int time = 0;
  bool constrained = false;
  double g_n = 0;
};

ScaledBarrierPoint scale_time_barrier(const ScalingMap& s, double tau, const BarrierSpec& g);

// Integer caps for Y at times 2l, l = m0..m1 (INT_MAX where unconstrained).
struct DiscreteBarrier {
  int m0 = 0;
  int m1 = 0;
  std::vector<int> caps;
};
inline constexpr int kNoCap = std::numeric_limits<int>::max() / 4;
DiscreteBarrier discretize_barrier(int n, const BarrierSpec& g, double L, double M);

double rescale_X(const TopCurveX& curve, double R, int n, double t);

}  // namespace aztec
