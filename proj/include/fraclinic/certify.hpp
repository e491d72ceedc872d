// Post-hoc certificates for computed trajectories. Three independent checks
// live here: a truncation-iteration sup bound driven by the subcritical
// integrability exponent, pointwise decay barriers built from the fractional
// Allen-Cahn layer, and the positive-part membership inequalities behind the
// comparison arguments. Certifiers are pure functions of their inputs and
// never mutate the solution they examine.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fraclinic/detail/banded_lu.hpp"
#include "fraclinic/energy.hpp"
#include "fraclinic/mp_solver.hpp"

namespace fraclinic {

// ---------------------------------------------------------------------------
// truncation iteration

// Record of the level-set iteration at the accepted truncation scale delta:
// the levels A_k = 1 - 2^-k, the masses U_k of the rescaled profile above
// each level, and the sup bound the decay of the masses certifies.
struct DeGiorgiTrace {
  double t = 0.0;              // integrability exponent driving the iteration
  std::vector<double> levels;  // A_k, k = 0..k_max
  std::vector<double> masses;  // U_k at the accepted delta, non-increasing
  double delta = 0.0;          // accepted truncation scale in (0, 1)
  double mu_dg = 0.0;          // observed geometric rate of the masses, < 1
  double bound = 0.0;          // certified sup bound: sup |q| <= lt_norm / delta
  double lt_norm = 0.0;        // L^t norm of the input
  double sup_direct = 0.0;     // measured sup, sits strictly below the bound
};

// Runs the truncation iteration on the rescaled profile phi = delta |q| / ||q||_t
// and searches for the largest truncation scale whose level masses collapse.
// The absolute value folds the mirrored truncation (-phi - A_k)^+ into the
// same array: at each node at most one sign survives the positive part, and
// ((a-A)^+)^t + ((-a-A)^+)^t = ((|a|-A)^+)^t exactly, so the single ladder
// certifies the sup of |q| from both sides at once. A scale is admissible
// when U_0 <= delta^t, the top mass U_{k_max} vanishes exactly (the discrete
// form of "the masses reach zero"), and the observed decay rate of the
// remaining masses stays below one. Admissibility is monotone in delta, so
// bisection finds the boundary.
inline DeGiorgiTrace degiorgi_verify(const GridFunction& q, const ConfinedProblem& prob,
                                     int k_max = 30) {
  if (prob.frac.s > 0.5)
    throw std::invalid_argument(
        "degiorgi_verify: the iteration rests on the subcritical embedding, s <= 1/2 only");
  if (k_max < 2) throw std::invalid_argument("degiorgi_verify: need k_max >= 2");
  DeGiorgiTrace tr;
  tr.t = prob.frac.s < 0.5 ? critical_exponent(prob.frac.s) : prob.t_exponent;
  tr.levels.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) tr.levels[k] = 1.0 - std::ldexp(1.0, -k);
  tr.lt_norm = lp_norm(q, tr.t);
  tr.sup_direct = q.sup_norm();
  if (tr.lt_norm == 0.0) {
    // the zero trajectory: every level mass vanishes and any scale works
    tr.masses.assign(k_max + 1, 0.0);
    tr.delta = 0.5;
    return tr;
  }

  const Eigen::MatrixXd phi_hat = q.values.cwiseAbs() / tr.lt_norm;
  const Eigen::VectorXd w = q.grid.trapezoid_weights();
  const double h = q.grid.h();
  const double t = tr.t;

  auto masses_at = [&](double delta, std::vector<double>& U) {
    U.assign(k_max + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
      const double A = tr.levels[k];
      double acc = 0.0;
      for (int i = 0; i < q.grid.N; ++i) {
        double row = 0.0;
        for (int j = 0; j < q.components(); ++j) {
          const double excess = delta * phi_hat(i, j) - A;
          if (excess > 0.0) row += std::pow(excess, t);
        }
        acc += h * w[i] * row;
      }
      U[k] = acc;
      if (acc == 0.0) break;  // the ladder is monotone, the rest stay zero
    }
  };
  auto envelope = [&](const std::vector<double>& U) {
    double mu = 0.0;
    for (int k = 2; k <= k_max; ++k)
      if (U[k - 1] > 0.0) mu = std::max(mu, U[k] / U[k - 1]);
    return mu;
  };
  std::vector<double> U;
  auto admissible = [&](double delta) {
    masses_at(delta, U);
    return U[0] <= std::pow(delta, t) * (1.0 + 1e-12) && U[k_max] == 0.0 && envelope(U) < 1.0;
  };

  double lo = 1e-8;
  double hi = 1.0 - 1e-12;
  if (!admissible(lo))
    throw std::runtime_error(
        "degiorgi_verify: no admissible truncation scale, the level masses do not decay");
  if (admissible(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (admissible(mid) ? lo : hi) = mid;
    }
  }
  tr.delta = lo;
  masses_at(tr.delta, tr.masses);
  tr.mu_dg = envelope(tr.masses);
  tr.bound = tr.lt_norm / tr.delta;
  // the accepted scale keeps the profile under the top level, so the bound
  // clears the measured sup with the margin 1/A_{k_max}
  if (tr.bound < tr.sup_direct)
    throw std::logic_error("degiorgi_verify: certified bound fell below the measured sup");
  return tr;
}

// ---------------------------------------------------------------------------
// transition layer

// Increasing solution of the fractional Allen-Cahn equation on the grid,
// connecting the wells -1 and +1 through constant tails, together with its
// derivative profile. The derivative is the positive decaying weight the
// barrier construction multiplies.
struct LayerProfile {
  GridFunction beta_tilde;   // the increasing layer through the double well
  GridFunction beta_layer;   // centered-difference derivative, positive
  int newton_iterations = 0;
  double residual_sup = 0.0;
  double edge_defect = 0.0;  // max deviation of the boundary values from the wells
};

namespace detail {

// Band storage of the constant-extension operator matrix restricted to
// |i - j| <= kb, with the exact diagonal of the full matrix. Dropping the far
// couplings but keeping their diagonal mass adds a positive difference form,
// so the truncation stays safely factorable and the Newton direction it
// yields is a small, fixed-factor perturbation of the exact one.
inline Eigen::MatrixXd layer_operator_band(const DifferenceWeights& W, int kb) {
  const int N = W.N;
  const double h = W.h;
  const Eigen::VectorXd P = W.bulk_prefix();
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(2 * kb + 1, N);
  for (int i = 0; i < N; ++i) {
    const double wi = (i == 0 || i == N - 1) ? 0.5 : 1.0;
    const double scale = 1.0 / (h * wi);
    double diag;
    if (i == 0) {
      diag = W.panel_right[0];
      for (int m = 1; m < N; ++m) diag += W.coef(0, m);
    } else if (i == N - 1) {
      diag = W.panel_left[N - 1];
      for (int m = 1; m < N; ++m) diag += W.coef(N - 1 - m, m);
    } else {
      // interior row: bulk prefix sums to each side, corrected at the two
      // pairs that reach a boundary node, plus both tail panels
      diag = P[i] + P[N - 1 - i] + (W.coef(0, i) - W.bulk[i - 1]) +
             (W.coef(i, N - 1 - i) - W.bulk[N - 2 - i]) + W.panel_right[i] + W.panel_left[i];
    }
    band(kb, i) = diag * scale;
    for (int m = 1; m <= kb; ++m) {
      if (i + m <= N - 1) {
        const double c = (i == 0 || i == N - 1 - m) ? W.coef(i, m) : W.bulk[m - 1];
        band(kb - m, i + m) -= c * scale;  // entry (i, i + m)
      }
      if (i - m >= 0) {
        const double c = (i - m == 0 || i == N - 1) ? W.coef(i - m, m) : W.bulk[m - 1];
        band(kb + m, i - m) -= c * scale;  // entry (i, i - m)
      }
    }
    // panel couplings to the boundary columns, when they fall inside the band
    if (i != N - 1 && N - 1 - i <= kb) band(kb + i - (N - 1), N - 1) -= W.panel_right[i] * scale;
    if (i != 0 && i <= kb) band(kb + i, 0) -= W.panel_left[i] * scale;
  }
  return band;
}

}  // namespace detail

// Solves the layer equation by damped Newton from the tanh profile. The
// constant tails pin the far field to the wells and the initial guess selects
// the increasing branch; the solved profile is then centered by averaging
// against its point reflection, which the equation is invariant under.
inline LayerProfile layer_solution(double s, const Grid& grid) {
  if (!(grid.X >= 20.0))
    throw std::invalid_argument("layer_solution: the layer needs room to settle, X >= 20");
  const FracParams fp(s);
  const int N = grid.N;
  const double h = grid.h();

  Eigen::MatrixXd vals(N, 1);
  for (int i = 0; i < N; ++i) vals(i, 0) = std::tanh(grid.node(i));
  GridFunction u(grid, vals, Extension::constant_tail);

  auto residual = [&](const GridFunction& v) -> Eigen::VectorXd {
    const Eigen::MatrixXd Av = frac_laplacian(v, fp);
    const auto c = v.values.col(0).array();
    return (Av.col(0).array() - c + c.cube()).matrix();
  };

  const bool dense = N <= 2500;
  const int kb = std::min(64, N - 1);
  const DifferenceWeights W(grid, fp);
  Eigen::MatrixXd A_dense;
  Eigen::MatrixXd band0;
  if (dense) {
    A_dense = frac_operator_matrix_const_ext(W);
  } else {
    band0 = detail::layer_operator_band(W, kb);
  }

  Eigen::VectorXd F = residual(u);
  double rn = F.cwiseAbs().maxCoeff();
  LayerProfile out;
  const int max_iter = 200;
  while (rn > 1e-10 && out.newton_iterations < max_iter) {
    Eigen::VectorXd d;
    const Eigen::ArrayXd cubic = 3.0 * u.values.col(0).array().square() - 1.0;
    if (dense) {
      Eigen::MatrixXd J = A_dense;
      J.diagonal().array() += cubic;
      d = Eigen::PartialPivLU<Eigen::MatrixXd>(J).solve(-F);
    } else {
      Eigen::MatrixXd Jb = band0;
      Jb.row(kb).array() += cubic.transpose();
      d = -F;
      detail::BandedLU(std::move(Jb), kb).solve_in_place(d);
    }
    double alpha = 1.0;
    bool accepted = false;
    GridFunction trial = u;
    for (int bt = 0; bt < 40; ++bt) {
      trial.values.col(0) = u.values.col(0) + alpha * d;
      const Eigen::VectorXd Ft = residual(trial);
      const double rt = Ft.cwiseAbs().maxCoeff();
      if (std::isfinite(rt) && rt <= rn * (1.0 - 1e-4 * alpha)) {
        u.values = trial.values;
        F = Ft;
        rn = rt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++out.newton_iterations;
    if (!accepted)
      throw std::runtime_error("layer_solution: damped Newton stalled, residual would not drop");
  }
  if (rn > 1e-8)
    throw std::runtime_error("layer_solution: Newton did not converge on this grid");

  // center: project onto the odd representative of the translation family
  const Eigen::VectorXd c = u.values.col(0);
  u.values.col(0) = 0.5 * (c - c.reverse());
  out.residual_sup = residual(u).cwiseAbs().maxCoeff();

  const Eigen::VectorXd diffs = u.values.col(0).tail(N - 1) - u.values.col(0).head(N - 1);
  if (diffs.minCoeff() < -1e-10)
    throw std::runtime_error("layer_solution: profile is not monotone, left the increasing branch");
  out.edge_defect =
      std::max(std::abs(u.values(0, 0) + 1.0), std::abs(u.values(N - 1, 0) - 1.0));
  if (out.edge_defect > 0.05)
    throw std::runtime_error("layer_solution: boundary values far from the wells, widen the grid");

  Eigen::MatrixXd deriv(N, 1);
  deriv(0, 0) = diffs[0] / h;
  deriv(N - 1, 0) = diffs[N - 2] / h;
  for (int i = 1; i < N - 1; ++i) deriv(i, 0) = (u.values(i + 1, 0) - u.values(i - 1, 0)) / (2.0 * h);
  out.beta_tilde = u;
  out.beta_layer = GridFunction(grid, deriv);
  return out;
}

// ---------------------------------------------------------------------------
// decay barriers

// Pointwise comparison data for one trajectory: the layer profile, the
// zero-order coefficient its square induces, the amplitude and slack of the
// two barrier families, the radii and constants that fix the amplitude
// threshold, and the measured minima of both barriers over the grid.
struct BarrierCertificate {
  LayerProfile layer;
  GridFunction coefficient_a;    // 1 - 3 beta_tilde^2, in (-2, 1]
  double eta = 0.0;              // slack, multiplies 1 + |x|^s
  double A_mult = 0.0;           // amplitude multiplier over the threshold
  double A = 0.0;                // barrier amplitude A_mult * A_R0
  double C_s = 0.0;              // measured half-line power identity prefactor
  double R_bar = 0.0;            // radius where the confinement diagonal clears its threshold
  double R_tilde = 0.0;          // radius where the layer coefficient drops below -1
  double R0 = 0.0;               // max of the radii and the kernel constant radius
  double varsigma = 0.0;         // min of beta_layer inside [-R0, R0]
  double A_R0 = 0.0;             // sup |q| / varsigma, the amplitude threshold
  Eigen::VectorXd v_min, w_min;  // per-component minima of A beta -+ q + slack
  bool pass = false;             // every minimum >= -1e-8
};

// Evaluates the two barrier families A beta_layer -+ q_j + eta (1 + |x|^s) on
// every node and certifies nonnegativity. The amplitude threshold comes from
// the measured sup of q; outside [-R0, R0] the barriers are carried by the
// equation itself, inside by the amplitude, so a failing certificate at a
// comfortable multiplier indicates the trajectory does not decay the way a
// solution must.
inline BarrierCertificate build_barrier(const GridFunction& q, const ConfinedProblem& prob,
                                        LayerProfile layer, double eta, double A_mult) {
  if (prob.frac.s > 0.5)
    throw std::invalid_argument(
        "build_barrier: the comparison needs the slow kernel tail, s <= 1/2 only");
  if (!(eta > 0.0)) throw std::invalid_argument("build_barrier: need slack eta > 0");
  if (!(A_mult > 1.0)) throw std::invalid_argument("build_barrier: need amplitude multiplier > 1");
  if (static_cast<int>(prob.matrix.d_j.size()) != prob.matrix.components)
    throw std::invalid_argument("build_barrier: confinement matrix carries no diagonal tail data");
  const Grid& g = q.grid;
  if (layer.beta_tilde.grid.N != g.N || layer.beta_tilde.grid.X != g.X)
    throw std::invalid_argument("build_barrier: layer profile lives on a different grid");

  BarrierCertificate cert;
  cert.eta = eta;
  cert.A_mult = A_mult;
  cert.C_s = estimate_Cs(prob.frac).C_s;

  const double s = prob.frac.s;
  const int N = g.N;
  const double sup_q = q.sup_norm();
  const double threshold =
      3.0 + prob.potential.a0 * (1.0 + std::pow(sup_q, prob.potential.p - 2.0));

  Eigen::MatrixXd avals = (1.0 - 3.0 * layer.beta_tilde.values.col(0).array().square()).matrix();
  cert.coefficient_a = GridFunction(g, avals);

  // outward data per radius: walk the nonnegative nodes from the box edge
  // inward and keep the smallest radius whose entire suffix satisfies each
  // condition; the mirror node covers the negative side
  int i0 = 0;
  while (g.node(i0) < 0.0) ++i0;
  const double inf = std::numeric_limits<double>::infinity();
  cert.R_bar = inf;
  cert.R_tilde = inf;
  bool d_ok = true, a_ok = true;
  for (int i = N - 1; i >= i0; --i) {
    const double r = g.node(i);
    const int im = N - 1 - i;
    if (d_ok) {
      bool here = r >= prob.matrix.D;
      for (int j = 0; here && j < prob.matrix.components; ++j)
        here = std::min(prob.matrix.d_j[j](r), prob.matrix.d_j[j](-r)) > threshold;
      if (here)
        cert.R_bar = r;
      else
        d_ok = false;
    }
    if (a_ok) {
      if (std::max(cert.coefficient_a.values(i, 0), cert.coefficient_a.values(im, 0)) <= -1.0)
        cert.R_tilde = r;
      else
        a_ok = false;
    }
    if (!d_ok && !a_ok) break;
  }

  cert.R0 = std::max({cert.R_bar, cert.R_tilde, 1.0 + std::pow(cert.C_s, 1.0 / (2.0 * s))});
  if (!(cert.R0 <= g.X))
    throw std::runtime_error("build_barrier: R0 = " + std::to_string(cert.R0) +
                             " exceeds the box, widen the grid");

  cert.varsigma = inf;
  for (int i = 0; i < N; ++i)
    if (std::abs(g.node(i)) <= cert.R0 + 1e-12)
      cert.varsigma = std::min(cert.varsigma, layer.beta_layer.values(i, 0));
  cert.A_R0 = sup_q / cert.varsigma;
  cert.A = A_mult * cert.A_R0;

  const int n = q.components();
  cert.v_min = Eigen::VectorXd::Constant(n, inf);
  cert.w_min = Eigen::VectorXd::Constant(n, inf);
  for (int i = 0; i < N; ++i) {
    const double base =
        cert.A * layer.beta_layer.values(i, 0) + eta * (1.0 + std::pow(std::abs(g.node(i)), s));
    for (int j = 0; j < n; ++j) {
      cert.v_min[j] = std::min(cert.v_min[j], base - q.values(i, j));
      cert.w_min[j] = std::min(cert.w_min[j], base + q.values(i, j));
    }
  }
  cert.pass = cert.v_min.minCoeff() >= -1e-8 && cert.w_min.minCoeff() >= -1e-8;
  if (!cert.pass && A_mult >= 2.0)
    throw std::runtime_error(
        "build_barrier: certificate failed at a comfortable amplitude, trajectory "
        "inconsistent with the expected decay");
  cert.layer = std::move(layer);
  return cert;
}

inline BarrierCertificate build_barrier(const GridFunction& q, const ConfinedProblem& prob,
                                        double eta, double A_mult) {
  return build_barrier(q, prob, layer_solution(prob.frac.s, q.grid), eta, A_mult);
}

// ---------------------------------------------------------------------------
// positive part membership

// Outcome of pushing a trajectory through the componentwise positive part
// above a level: the seminorm can only contract (truncation is 1-Lipschitz),
// and with a diagonal or sign-compatible confinement matrix the confinement
// integral is bounded by the original one, so the truncated function stays in
// the energy space.
struct PositivePartReport {
  double c_level = 0.0;
  double seminorm_sq_q = 0.0;
  double seminorm_sq_u = 0.0;
  double confinement_q = 0.0;  // int L q . q
  double confinement_u = 0.0;  // int L u . u
  double norm_u = 0.0;         // energy norm of the truncated function
  bool seminorm_contracts = false;
  bool confinement_bounded = false;
  bool in_space = false;
};

// The confinement comparison needs nonnegative matrix entries, and for a
// signed trajectory additionally a diagonal matrix: off-diagonal couplings
// can pair a positive against a negative component and flip the inequality.
// The report records what actually held on this input.
inline PositivePartReport positive_part_membership(const GridFunction& q,
                                                   const ConfinementMatrix& L,
                                                   const FracParams& frac, double c_level) {
  if (!(c_level > 0.0))
    throw std::invalid_argument("positive_part_membership: need a positive level");
  PositivePartReport rep;
  rep.c_level = c_level;
  GridFunction u = q;
  u.values = (q.values.array() - c_level).max(0.0).matrix();

  rep.seminorm_sq_q = gagliardo_sq(q, frac);
  rep.seminorm_sq_u = gagliardo_sq(u, frac);
  rep.confinement_q = 2.0 * confinement_integral(q, L);
  rep.confinement_u = 2.0 * confinement_integral(u, L);
  rep.norm_u = hs_tilde_norm(u, L, frac);

  const double tol_s = 1e-12 * (1.0 + rep.seminorm_sq_q);
  const double tol_c = 1e-12 * (1.0 + std::abs(rep.confinement_q));
  rep.seminorm_contracts = rep.seminorm_sq_u <= rep.seminorm_sq_q + tol_s;
  rep.confinement_bounded = rep.confinement_u <= rep.confinement_q + tol_c;
  rep.in_space = std::isfinite(rep.seminorm_sq_u) && std::isfinite(rep.confinement_u);
  return rep;
}

}  // namespace fraclinic
