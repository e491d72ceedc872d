// LU factorization of a banded matrix without pivoting. The layer Newton
// systems this backs are strictly diagonally dominant (the operator diagonal
// carries the whole kernel mass of the row plus the tail panels), so pivot
// growth cannot occur and the factorization stays inside the band.

#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace fraclinic {
namespace detail {

// Band storage: column c of `band` holds the matrix entries A(r, c) for
// r = c - kb .. c + kb at positions kb + r - c. Entries outside the matrix
// are ignored. Factor cost is O(N kb^2), each solve O(N kb).
struct BandedLU {
  int N = 0;
  int kb = 0;
  Eigen::MatrixXd f;  // factored in place: unit lower part and U share the band

  BandedLU(Eigen::MatrixXd band, int half_bandwidth)
      : N(static_cast<int>(band.cols())), kb(half_bandwidth), f(std::move(band)) {
    if (f.rows() != 2 * kb + 1)
      throw std::invalid_argument("BandedLU: band storage must have 2 kb + 1 rows");
    for (int k = 0; k < N; ++k) {
      const double p = f(kb, k);
      if (!(std::abs(p) > 1e-300))
        throw std::runtime_error("BandedLU: vanishing pivot, matrix is not diagonally dominant");
      const int nr = std::min(N - 1, k + kb) - k;
      if (nr <= 0) continue;
      f.col(k).segment(kb + 1, nr) /= p;
      const int cmax = std::min(N - 1, k + kb);
      for (int c = k + 1; c <= cmax; ++c) {
        const double u = f(kb + k - c, c);
        if (u != 0.0)
          f.col(c).segment(kb + k + 1 - c, nr) -= u * f.col(k).segment(kb + 1, nr);
      }
    }
  }

  void solve_in_place(Eigen::VectorXd& b) const {
    for (int k = 0; k < N; ++k) {
      const int nr = std::min(N - 1, k + kb) - k;
      if (nr > 0) b.segment(k + 1, nr) -= b[k] * f.col(k).segment(kb + 1, nr);
    }
    for (int k = N - 1; k >= 0; --k) {
      double acc = b[k];
      const int cmax = std::min(N - 1, k + kb);
      for (int c = k + 1; c <= cmax; ++c) acc -= f(kb + k - c, c) * b[c];
      b[k] = acc / f(kb, k);
    }
  }
};

}  // namespace detail
}  // namespace fraclinic
