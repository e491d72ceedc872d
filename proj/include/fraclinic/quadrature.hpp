#pragma once

// Small Gauss-Legendre helpers used by the nonlocal kernels: mapped panels
// and graded panel chains for endpoint-singular integrands.

#include "fraclinic/detail/gl_tables.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>

namespace fraclinic {

// Integrate f over [a, b] with an n-point Gauss-Legendre rule (n in {16, 24, 32, 64}).
template <typename F>
double gl_panel(F&& f, double a, double b, int n = 32) {
  const double* xs = nullptr;
  const double* ws = nullptr;
  switch (n) {
    case 16: xs = detail::kGlNodes16; ws = detail::kGlWeights16; break;
    case 24: xs = detail::kGlNodes24; ws = detail::kGlWeights24; break;
    case 32: xs = detail::kGlNodes32; ws = detail::kGlWeights32; break;
    case 64: xs = detail::kGlNodes64; ws = detail::kGlWeights64; break;
    default: throw std::invalid_argument("gl_panel: rule size must be 16, 24, 32 or 64");
  }
  const double mid = 0.5 * (a + b);
  const double rad = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += ws[k] * f(mid + rad * xs[k]);
  return acc * rad;
}

// Integrate f over [0, 1] with panels graded toward t = 1, where the
// integrands produced by the tail substitutions lose smoothness.
template <typename F>
double gl_graded_to_one(F&& f, int n = 32) {
  constexpr std::array<double, 6> cuts = {0.0, 0.5, 0.9, 0.99, 0.999, 1.0};
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    acc += gl_panel(f, cuts[k], cuts[k + 1], n);
  return acc;
}

}  // namespace fraclinic
