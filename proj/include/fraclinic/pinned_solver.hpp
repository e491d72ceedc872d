#pragma once

// Constrained minimization of the pinned energy: descent on the free nodal
// values with the datum held fixed, periodic clamping at the pin height, and
// an even-representative pass for symmetric data. Also the side experiments
// that probe the same energy: the small-epsilon scaling law, the unpinned
// gradient-flow collapse, the regularity bootstrap recursion, and empirical
// Holder diagnostics.

#include "fraclinic/detail/lbfgs.hpp"
#include "fraclinic/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fraclinic {

struct PinnedProblem {
  FracParams frac;
  PinnedPotential potential;
  Grid grid{1.0, 3};
  PinRegion pin;
  Eigen::MatrixXd datum;  // one row per pin index, components across columns
  double alpha = 0.5;     // Holder exponent of the datum
  double beta_bar = 0.0;  // regularity target when alpha collides with s

  // the provable Holder exponent of the minimizer: min(alpha, s), except at
  // the resonant case alpha == s where a strictly smaller target is chosen
  double regularity_target() const {
    if (alpha != frac.s) return std::min(alpha, frac.s);
    if (!(beta_bar > 0.0 && beta_bar < frac.s))
      throw std::invalid_argument("PinnedProblem: alpha == s needs beta_bar in (0, s)");
    return beta_bar;
  }

  void validate() const {
    frac.validate();
    if (frac.s <= 0.5 && !(pin.a < pin.b))
      throw std::invalid_argument(
          "PinnedProblem: a degenerate pin interval needs s > 1/2, the minimum "
          "is otherwise not achieved");
    if (datum.rows() != static_cast<Eigen::Index>(pin.index_set.size()))
      throw std::invalid_argument("PinnedProblem: datum rows must match the pin index count");
    if (datum.cols() != potential.components)
      throw std::invalid_argument("PinnedProblem: datum columns must match the potential arity");
    if (!datum.allFinite()) throw std::invalid_argument("PinnedProblem: datum must be finite");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("PinnedProblem: datum Holder exponent must lie in (0,1)");
    if (datum.size() > 0 && datum.cwiseAbs().maxCoeff() > potential.R + 1e-12)
      throw std::invalid_argument("PinnedProblem: datum exceeds the pin height R");
    (void)regularity_target();
  }
};

struct DecayMargins {
  double value_left = 0.0;
  double value_right = 0.0;
  double deriv_left = 0.0;
  double deriv_right = 0.0;
  double tail_exponent = 0.0;  // from a log-log fit over the edge windows
};

struct HolderEstimate {
  double seminorm = 0.0;
  double sup = 0.0;
};

struct SolveReport {
  double energy = 0.0;
  double initial_energy = 0.0;
  double residual_sup = 0.0;
  int iterations = 0;
  bool converged = false;
  DecayMargins decay;
  double evenness_defect = 0.0;
  bool symmetrized = false;
  HolderEstimate holder;
  double holder_exponent = 0.0;
  double sup_norm = 0.0;
  unsigned long long seed = 0;
  double tol = 0.0;
};

struct PinnedSolveOptions {
  double tol = 1e-6;  // sup norm of the Euler-Lagrange residual on free nodes
  int max_iter = 2000;
  int K_cut = 10;  // clamp cadence, in accepted iterations
  unsigned long long seed = 0;
  double energy_floor = -1e12;
  double decay_window = 2.0;
  EvalPath path = EvalPath::automatic;
};

// sup |q| and sup |q'| over the outer windows [X-window, X] on both sides,
// plus a crude decay exponent from regressing log|q| on log|x| there
inline DecayMargins check_decay(const GridFunction& q, double window) {
  const Grid& g = q.grid;
  if (!(window > 0.0 && window < g.X))
    throw std::invalid_argument("check_decay: window must lie in (0, X)");
  DecayMargins m;
  std::vector<double> lx, lq;
  for (int i = 0; i < g.N; ++i) {
    const double x = g.node(i);
    if (std::abs(x) < g.X - window) continue;
    const double val = q.values.row(i).norm();
    const int il = std::max(0, i - 1), ir = std::min(g.N - 1, i + 1);
    const double dv =
        (q.values.row(ir) - q.values.row(il)).norm() / ((ir - il) * g.h());
    if (x < 0.0) {
      m.value_left = std::max(m.value_left, val);
      m.deriv_left = std::max(m.deriv_left, dv);
    } else {
      m.value_right = std::max(m.value_right, val);
      m.deriv_right = std::max(m.deriv_right, dv);
    }
    if (val > 1e-300 && std::abs(x) > 0.0) {
      lx.push_back(std::log(std::abs(x)));
      lq.push_back(std::log(val));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (size_t k = 0; k < lx.size(); ++k) mx += lx[k], my += lq[k];
    mx /= lx.size();
    my /= lq.size();
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < lx.size(); ++k) {
      num += (lx[k] - mx) * (lq[k] - my);
      den += (lx[k] - mx) * (lx[k] - mx);
    }
    if (den > 0.0) m.tail_exponent = -num / den;
  }
  return m;
}

// empirical C^beta seminorm: sup over a ladder of node pairs of
// |q(x) - q(y)| / |x - y|^beta; all short lags plus a geometric tail of
// longer ones, strided when the pair budget would blow up
inline HolderEstimate holder_seminorm(const GridFunction& q, double beta_exp) {
  if (!(beta_exp > 0.0 && beta_exp <= 1.0))
    throw std::invalid_argument("holder_seminorm: exponent must lie in (0, 1]");
  const int N = q.grid.N;
  const double h = q.grid.h();
  std::vector<int> lags;
  for (int d = 1; d <= std::min(32, N - 1); ++d) lags.push_back(d);
  for (int d = 40; d <= N - 1; d = std::max(d + 1, static_cast<int>(d * 1.25)))
    lags.push_back(d);
  const long long budget = 4000000;
  const long long stride =
      std::max<long long>(1, static_cast<long long>(N) * static_cast<long long>(lags.size()) / budget);
  HolderEstimate est;
  est.sup = q.sup_norm();
  for (int d : lags) {
    const double denom = std::pow(d * h, beta_exp);
    for (int i = 0; i + d < N; i += static_cast<int>(stride)) {
      const double diff = (q.values.row(i) - q.values.row(i + d)).norm();
      est.seminorm = std::max(est.seminorm, diff / denom);
    }
  }
  return est;
}

// Replace q by the better of the max/min recombination with its reflection.
// Both candidates are exactly even, and their energies sum to at most twice
// the input energy, so the cheaper one never loses to q.
inline GridFunction even_symmetrize(const GridFunction& q, const PinnedPotential& V,
                                    const FracParams& params) {
  const GridFunction qr = reflect(q);
  auto [M, m] = max_min_combine(q, qr);
  const double iM = energy_pinned(M, V, params).total;
  const double im = energy_pinned(m, V, params).total;
  return iM <= im ? M : m;
}

namespace detail {

// datum extended by a linear taper to zero over one unit on each side of the
// pin interval; keeps the initial energy finite and inherits the datum height
inline Eigen::MatrixXd tapered_initial(const PinnedProblem& prob) {
  const Grid& g = prob.grid;
  const int n = prob.potential.components;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.N, n);
  if (prob.pin.index_set.empty()) return v;
  for (size_t k = 0; k < prob.pin.index_set.size(); ++k)
    v.row(prob.pin.index_set[k]) = prob.datum.row(static_cast<Eigen::Index>(k));
  const int first = prob.pin.index_set.front();
  const int last = prob.pin.index_set.back();
  const double xa = g.node(first), xb = g.node(last);
  for (int i = 0; i < first; ++i) {
    const double f = std::max(0.0, 1.0 - (xa - g.node(i)));
    v.row(i) = f * prob.datum.row(0);
  }
  for (int i = last + 1; i < g.N; ++i) {
    const double f = std::max(0.0, 1.0 - (g.node(i) - xb));
    v.row(i) = f * prob.datum.row(prob.datum.rows() - 1);
  }
  v.row(0).setZero();
  v.row(g.N - 1).setZero();
  return v;
}

}  // namespace detail

inline std::pair<GridFunction, SolveReport> solve_pinned(const PinnedProblem& prob,
                                                         const PinnedSolveOptions& opts = {}) {
  prob.validate();
  const Grid& g = prob.grid;
  const int n = prob.potential.components;
  const double h = g.h();
  const Eigen::VectorXd w = g.trapezoid_weights();
  const double R = prob.potential.R;

  std::vector<char> pinned(g.N, 0);
  for (int i : prob.pin.index_set) pinned[i] = 1;
  // box-edge nodes belong to the truncated far field and stay at zero, which
  // also keeps the zero-extension tail mass finite for s >= 1/2
  pinned[0] = 1;
  pinned[g.N - 1] = 1;
  std::vector<int> free;
  for (int i = 0; i < g.N; ++i)
    if (!pinned[i]) free.push_back(i);

  GridFunction q(g, detail::tapered_initial(prob), Extension::zero);
  const double initial_energy = energy_pinned(q, prob.potential, prob.frac, opts.path).total;

  const int F = static_cast<int>(free.size());
  Eigen::VectorXd x(F * n);
  for (int k = 0; k < F; ++k) x.segment(k * n, n) = q.values.row(free[k]).transpose();

  auto scatter = [&](const Eigen::VectorXd& xv) {
    for (int k = 0; k < F; ++k) q.values.row(free[k]) = xv.segment(k * n, n).transpose();
  };

  // One operator apply per evaluation: by the quadratic form's own Euler
  // identity, sum_i h w_i q_i . ((-Delta)^s q)_i reproduces the seminorm
  // squared exactly, so value and gradient come from the same pass.
  long long evals = 0;
  auto fg = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& grad) {
    scatter(xv);
    ++evals;
    const Eigen::MatrixXd op = frac_laplacian(q, prob.frac, opts.path);
    double kin = 0.0, pot = 0.0;
    for (int i = 0; i < g.N; ++i) {
      kin += h * w[i] * q.values.row(i).dot(op.row(i));
      pot += h * w[i] * prob.potential.V(q.values.row(i).transpose());
    }
    grad.resize(F * n);
    for (int k = 0; k < F; ++k) {
      const int i = free[k];
      const Eigen::VectorXd gv =
          h * w[i] *
          (op.row(i).transpose() - prob.potential.grad(q.values.row(i).transpose()));
      grad.segment(k * n, n) = gv;
    }
    return 0.5 * kin - pot;
  };

  detail::LbfgsOptions lo;
  lo.max_iter = opts.max_iter;
  // free nodes are interior, their trapezoid weight is 1, so the flat
  // gradient is exactly h times the residual
  lo.grad_tol = opts.tol * h;
  lo.hook_every = opts.K_cut;
  lo.hook = [&](Eigen::VectorXd& xv) {
    xv = xv.cwiseMax(-R).cwiseMin(R);
  };
  lo.f_floor = opts.energy_floor;

  detail::LbfgsResult lr;
  if (F > 0) lr = detail::lbfgs_minimize(fg, x, lo);
  if (lr.floor_hit)
    throw std::runtime_error(
        "solve_pinned: energy diverged below the configured floor; the "
        "potential violates its sign hypothesis");

  // final clamp so the representative honors |q| <= R even between cadences
  x = x.cwiseMax(-R).cwiseMin(R);
  scatter(x);

  // even data on a symmetric interval admit an even minimizer; take it
  bool symmetrized = false;
  if (std::abs(prob.pin.a + prob.pin.b) <= 1e-12 * std::max(1.0, g.X)) {
    bool datum_even = true;
    const Eigen::Index K = prob.datum.rows();
    for (Eigen::Index k = 0; k < K; ++k)
      if ((prob.datum.row(k) - prob.datum.row(K - 1 - k)).lpNorm<Eigen::Infinity>() > 1e-12)
        datum_even = false;
    if (datum_even && K > 0) {
      const GridFunction sym = even_symmetrize(q, prob.potential, prob.frac);
      if (energy_pinned(sym, prob.potential, prob.frac, opts.path).total <=
          energy_pinned(q, prob.potential, prob.frac, opts.path).total)
        q = sym;
      symmetrized = true;
    }
  }

  SolveReport rep;
  rep.initial_energy = initial_energy;
  rep.energy = energy_pinned(q, prob.potential, prob.frac, opts.path).total;
  rep.iterations = lr.iterations;
  rep.seed = opts.seed;
  rep.tol = opts.tol;
  rep.symmetrized = symmetrized;
  {
    const GridFunction res = grad_energy_pinned(q, prob.potential, prob.frac, free, opts.path);
    rep.residual_sup = 0.0;
    for (int i : free)
      rep.residual_sup = std::max(rep.residual_sup, res.values.row(i).lpNorm<Eigen::Infinity>());
  }
  rep.converged = rep.residual_sup <= opts.tol;
  rep.decay = check_decay(q, std::min(opts.decay_window, 0.5 * g.X));
  rep.evenness_defect = (q.values - reflect(q).values).lpNorm<Eigen::Infinity>();
  rep.holder_exponent = prob.regularity_target();
  rep.holder = holder_seminorm(q, rep.holder_exponent);
  rep.sup_norm = q.sup_norm();
  return {q, rep};
}

// ---------------------------------------------------------------------------
// scaling law of the pinned energy under q(x/eps) concentration

struct ScalingOptions {
  double X = 1.25;
  int N = 5121;
  double well_scale = 0.02;  // quadratic well strength; small so the kinetic
                             // part dominates at every eps in the sweep
};

struct ScalingResult {
  std::vector<double> eps;
  std::vector<double> energy;
  double slope = 0.0;  // d log I / d log eps
  bool decreasing = false;
};

// I(q_eps) for the clamped double-log profile concentrated at scale eps; the
// least-squares slope of log I against log eps exposes the eps^(1-2s) law
// below s = 1/2 and the faster collapse at s = 1/2.
inline ScalingResult scaling_experiment(double s, double M_val,
                                        const std::vector<double>& eps_list,
                                        const ScalingOptions& opt = {}) {
  if (!(s > 0.0 && s <= 0.5))
    throw std::invalid_argument("scaling_experiment: the construction needs s in (0, 1/2]");
  if (!(M_val < 0.0))
    throw std::invalid_argument("scaling_experiment: the clamp level must be negative");
  if (eps_list.size() < 2)
    throw std::invalid_argument("scaling_experiment: need at least two scales");
  for (size_t k = 0; k + 1 < eps_list.size(); ++k)
    if (!(eps_list[k] > eps_list[k + 1] && eps_list[k + 1] > 0.0))
      throw std::invalid_argument("scaling_experiment: scales must decrease and stay positive");

  const Grid g(opt.X, opt.N);
  FracParams params;
  params.s = s;
  params.c_s = cs_constant(s);
  PotentialParams pp;
  pp.scale = opt.well_scale;
  const PinnedPotential V = builtin_library().make_pinned("quadratic-well", pp);

  ScalingResult out;
  out.eps = eps_list;
  for (double eps : eps_list) {
    // sampled half a cell off the nodes: the profile's logarithmic point must
    // not land on a node, or the clamp value spreads over a whole cell and
    // pollutes the s = 1/2 rate
    const double theta = s < 0.5 ? 1.0 : 1.0 / eps;
    Eigen::MatrixXd vals(g.N, 1);
    for (int i = 0; i < g.N; ++i) {
      const double u = (g.node(i) - 0.5 * g.h()) / eps;
      double val = 0.0;
      if (std::abs(u) < 1.0)
        val = std::max(-std::log(1.0 - std::log(std::abs(u))) / theta, M_val);
      vals(i, 0) = val;
    }
    const GridFunction qe(g, vals, Extension::zero);
    const double I = energy_pinned(qe, V, params).total;
    if (!std::isfinite(I))
      throw std::runtime_error(
          "scaling_experiment: energy not finite, grid too coarse near the "
          "profile's singular point");
    out.energy.push_back(I);
  }
  out.decreasing = true;
  for (size_t k = 0; k + 1 < out.energy.size(); ++k)
    if (!(out.energy[k] > out.energy[k + 1])) out.decreasing = false;

  double mx = 0.0, my = 0.0;
  const size_t K = eps_list.size();
  for (size_t k = 0; k < K; ++k) {
    mx += std::log(eps_list[k]);
    my += std::log(out.energy[k]);
  }
  mx /= K;
  my /= K;
  double num = 0.0, den = 0.0;
  for (size_t k = 0; k < K; ++k) {
    num += (std::log(eps_list[k]) - mx) * (std::log(out.energy[k]) - my);
    den += (std::log(eps_list[k]) - mx) * (std::log(eps_list[k]) - mx);
  }
  out.slope = num / den;
  return out;
}

// ---------------------------------------------------------------------------
// gradient-flow probe for the whole-line nonexistence obstruction

struct NonexistenceOptions {
  double X = 8.0;
  int N = 513;
  double dt = 0.02;
  int steps = 800;
  int sample_every = 50;
  double amplitude = 1.0;  // height of the initial bump; zero stays put
};

struct NonexistenceReport {
  double initial_sup = 0.0;
  double final_sup = 0.0;
  int steps = 0;
  // discrete maximum principle data collected along the flow: the operator
  // evaluated at the running maximum, and the gap between the residual there
  // and twice the maximum value
  double min_operator_at_max = kInfinity;
  double min_forcing_gap = kInfinity;
  int checks = 0;
};

// Explicit Euler descent of the unpinned energy for the symmetric quadratic
// well. Any positive maximum has nonnegative operator value while the well
// pushes strictly down, so no nonzero rest state can survive; the flow is
// expected to collapse to zero.
inline NonexistenceReport nonexistence_probe(const PinnedPotential& V, const FracParams& params,
                                             const NonexistenceOptions& opt = {}) {
  if (V.components != 1)
    throw std::invalid_argument("nonexistence_probe: the obstruction argument is scalar");
  Eigen::VectorXd e1(1);
  e1 << 1.0;
  const double scale = -0.5 * V.grad(e1)(0);
  for (double t : {0.3, 1.0, 2.5})
    if (std::abs(V.V(t * e1) + scale * t * t) > 1e-10 * std::max(1.0, scale * t * t))
      throw std::invalid_argument("nonexistence_probe: potential is not the quadratic well");

  const Grid g(opt.X, opt.N);
  Eigen::MatrixXd vals(g.N, 1);
  for (int i = 0; i < g.N; ++i)
    vals(i, 0) = opt.amplitude * std::exp(-g.node(i) * g.node(i));
  vals(0, 0) = 0.0;
  vals(g.N - 1, 0) = 0.0;
  GridFunction q(g, vals, Extension::zero);

  NonexistenceReport rep;
  rep.initial_sup = q.sup_norm();
  rep.steps = opt.steps;
  for (int step = 0; step < opt.steps; ++step) {
    const Eigen::MatrixXd op = frac_laplacian(q, params);
    if (step % opt.sample_every == 0) {
      int imax = 0;
      q.values.col(0).maxCoeff(&imax);
      const double m = q.values(imax, 0);
      if (m > 1e-10) {
        rep.min_operator_at_max = std::min(rep.min_operator_at_max, op(imax, 0));
        const double residual = std::abs(op(imax, 0) + 2.0 * scale * m);
        rep.min_forcing_gap = std::min(rep.min_forcing_gap, residual - 2.0 * scale * m);
        ++rep.checks;
      }
    }
    for (int i = 1; i + 1 < g.N; ++i)
      q.values(i, 0) -= opt.dt * (op(i, 0) + 2.0 * scale * q.values(i, 0));
    if (q.sup_norm() > 10.0 * rep.initial_sup)
      throw std::runtime_error("nonexistence_probe: flow diverged, reduce the time step");
  }
  rep.final_sup = q.sup_norm();
  return rep;
}

// ---------------------------------------------------------------------------
// regularity bootstrap recursion beta_k = 2s + gamma beta_{k-1}

struct BootstrapResult {
  std::vector<double> sequence;  // starts at beta_start
  double limit = 0.0;            // 2s / (1 - gamma)
  int crossed_at = -1;           // first index with beta > 1
};

inline BootstrapResult bootstrap_exponents(double s, double gamma, double beta_start) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("bootstrap_exponents: s must be in (0,1)");
  if (!(gamma > std::max(0.0, 1.0 - 2.0 * s) && gamma < 1.0))
    throw std::invalid_argument(
        "bootstrap_exponents: gamma must exceed max(0, 1-2s) and stay below 1");
  if (!(beta_start > 0.0 && beta_start <= s))
    throw std::invalid_argument("bootstrap_exponents: starting exponent must lie in (0, s]");
  BootstrapResult out;
  out.limit = 2.0 * s / (1.0 - gamma);
  out.sequence.push_back(beta_start);
  for (int k = 1; k <= 50; ++k) {
    const double next = 2.0 * s + gamma * out.sequence.back();
    out.sequence.push_back(next);
    if (next > 1.0) {
      out.crossed_at = k;
      break;
    }
  }
  return out;
}

}  // namespace fraclinic
