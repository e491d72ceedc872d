#pragma once

// Truncated-line representation of vector-valued profiles q : R -> R^n and
// the index bookkeeping for pinning regions and reflections.
//
// The grid is uniform and symmetric about 0 with an odd node count, so the
// node x = 0 exists and reflection x -> -x is an exact permutation of nodes.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraclinic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Grid {
  double X = 1.0;  // half width of the box [-X, X]
  int N = 3;       // node count, odd so that x = 0 is a node

  Grid() = default;

  Grid(double half_width, int point_count) : X(half_width), N(point_count) {
    if (!(X > 0.0)) throw std::invalid_argument("Grid: half width must be positive");
    if (N < 3 || N % 2 == 0) throw std::invalid_argument("Grid: node count must be odd and >= 3");
  }

  double h() const { return 2.0 * X / (N - 1); }

  double node(int i) const { return -X + h() * i; }

  Eigen::VectorXd nodes() const {
    Eigen::VectorXd x(N);
    for (int i = 0; i < N; ++i) x[i] = node(i);
    return x;
  }

  // Trapezoid quadrature weights on the node set (1 inside, 1/2 at the ends).
  // Spatial integrals over the box are sum_i h * w_i * f(x_i).
  Eigen::VectorXd trapezoid_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(N);
    w[0] = 0.5;
    w[N - 1] = 0.5;
    return w;
  }

  bool operator==(const Grid&) const = default;
};

// How a grid function continues beyond the box [-X, X].
enum class Extension {
  zero,           // q = 0 outside
  constant_tail,  // q frozen at its boundary node values
  power_tail,     // q(x) ~ q(+-X) * (X/|x|)^p with a declared exponent p
};

struct GridFunction {
  Grid grid;
  Eigen::MatrixXd values;  // N x n, row i = q(x_i)
  Extension extension = Extension::zero;
  double tail_exponent = 0.0;  // only meaningful for power_tail, must be > 0

  GridFunction() = default;

  GridFunction(Grid g, Eigen::MatrixXd vals, Extension ext = Extension::zero,
               double tail_exp = 0.0)
      : grid(g), values(std::move(vals)), extension(ext), tail_exponent(tail_exp) {
    if (values.rows() != grid.N)
      throw std::invalid_argument("GridFunction: value rows must match the node count");
    if (values.cols() < 1)
      throw std::invalid_argument("GridFunction: needs at least one component");
    if (!values.allFinite())
      throw std::invalid_argument("GridFunction: values must be finite");
    if (extension == Extension::power_tail && !(tail_exponent > 0.0))
      throw std::invalid_argument("GridFunction: power tail needs a positive exponent");
  }

  static GridFunction zeros(Grid g, int components = 1) {
    return GridFunction(g, Eigen::MatrixXd::Zero(g.N, components));
  }

  int components() const { return static_cast<int>(values.cols()); }

  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
};

// Pinning region [a, b] intersected with the grid; a = -inf and b = +inf are
// allowed. A degenerate request a = b snaps to the nearest node (a prescribed
// single point is a node on the grid). index_set is sorted ascending.
struct PinRegion {
  double a = 0.0;
  double b = 0.0;
  std::vector<int> index_set;
};

inline PinRegion pin_indices(const Grid& grid, double a, double b) {
  if (a > b) throw std::invalid_argument("pin_indices: need a <= b");
  PinRegion r;
  r.a = a;
  r.b = b;
  if (a == b) {
    if (std::isinf(a)) throw std::invalid_argument("pin_indices: degenerate interval at infinity");
    // snap to the nearest node; ties resolve toward -X via llround's rounding
    double t = (a + grid.X) / grid.h();
    int i = static_cast<int>(std::llround(t));
    i = std::max(0, std::min(grid.N - 1, i));
    if (std::abs(grid.node(i) - a) > grid.h() / 2 + 1e-12 * grid.X)
      throw std::invalid_argument("pin_indices: point lies outside the box");
    r.index_set.push_back(i);
    return r;
  }
  for (int i = 0; i < grid.N; ++i) {
    double x = grid.node(i);
    if (x >= a && x <= b) r.index_set.push_back(i);
  }
  return r;
}

// q_*(x) := q(-x). With the symmetric grid this is the exact index reversal
// i -> N-1-i; the extension sides swap along with the values.
inline GridFunction reflect(const GridFunction& q) {
  GridFunction out = q;
  out.values = q.values.colwise().reverse();
  return out;
}

// Componentwise M(x) := max{q(x), q_*(x)} and m(x) := min{...}. The identity
// M + m = q + q_* holds pointwise, which is what transfers energy estimates
// from the pair (q, q_*) to the pair (M, m).
inline std::pair<GridFunction, GridFunction> max_min_combine(const GridFunction& q,
                                                             const GridFunction& q_star) {
  if (!(q.grid == q_star.grid) || q.components() != q_star.components())
    throw std::invalid_argument("max_min_combine: grid or component mismatch");
  GridFunction M = q, m = q;
  M.values = q.values.cwiseMax(q_star.values);
  m.values = q.values.cwiseMin(q_star.values);
  return {std::move(M), std::move(m)};
}

}  // namespace fraclinic
