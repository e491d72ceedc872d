#pragma once

// Mountain-pass solver for the confined system
//
//   (-Delta)^s q(x) + L(x) q(x) = grad_q W(x, q(x)),   q : R -> R^n,
//
// posed in the energy space with squared norm ||q||^2 = [q]^2 + int L q . q
// and functional I(q) = (1/2)||q||^2 - int W(x, q).
//
// The functional has the classical mountain-pass geometry. Near the origin
// the superquadratic W is dominated by the quadratic part, so I >= beta > 0
// on the sphere ||q|| = rho; far out along a fixed bump the mu-homogeneous
// lower bound on W wins and the energy turns negative. Between those two
// facts sits a critical value c = inf over paths of the path maximum, with
// beta <= c <= max_eta I(eta q_end).
//
// The solver realizes the inf-max directly: it discretizes a path from 0 to
// the negative-energy endpoint, repeatedly pushes the highest node downhill
// (never letting the path maximum increase), and finally polishes the argmax
// state into a critical point by minimizing the weighted least-squares
// residual of the Euler-Lagrange equation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fraclinic/detail/lbfgs.hpp"
#include "fraclinic/energy.hpp"
#include "fraclinic/quadrature.hpp"

namespace fraclinic {

// ---------------------------------------------------------------------------
// problem container

struct ConfinedProblem {
  FracParams frac;
  ConfinedPotential potential;
  ConfinementMatrix matrix;
  Grid grid{8.0, 257};
  // integrability exponent used by the s = 1/2 certification branches, where
  // the embedding allows any finite exponent above 2
  double t_exponent = 4.0;

  // Structural hypotheses are sampled, not assumed: the potential must be
  // superquadratic in the Ambrosetti-Rabinowitz sense and the matrix must be
  // symmetric, coercive and divergent at infinity.
  void validate() const {
    frac.validate();
    if (potential.components != matrix.components)
      throw std::invalid_argument("ConfinedProblem: component mismatch between W and L");
    if (!(t_exponent > 2.0))
      throw std::invalid_argument("ConfinedProblem: need t_exponent > 2");
    if (!check_AR(potential).pass)
      throw std::invalid_argument("ConfinedProblem: superquadratic structure fails on samples");
    if (!check_matrix_hypotheses(matrix).pass)
      throw std::invalid_argument("ConfinedProblem: confinement matrix hypotheses fail on samples");
  }
};

// ---------------------------------------------------------------------------
// paths

// Discrete path in the energy space: a chain of grid functions joining the
// zero function to a fixed nonzero endpoint. The endpoints are never moved
// by the solver.
struct Path {
  std::vector<GridFunction> nodes;

  void validate() const {
    if (nodes.size() < 3) throw std::invalid_argument("Path: need at least 3 nodes");
    for (std::size_t k = 1; k < nodes.size(); ++k)
      if (!(nodes[k].grid == nodes[0].grid) || nodes[k].components() != nodes[0].components())
        throw std::invalid_argument("Path: node grid or component mismatch");
    if (nodes.front().sup_norm() != 0.0)
      throw std::invalid_argument("Path: first node must be identically zero");
    if (nodes.back().sup_norm() == 0.0)
      throw std::invalid_argument("Path: last node must be a nonzero endpoint");
  }
};

// Straight segment eta -> eta q_end sampled at P nodes. The last multiplier
// is exactly 1, so the endpoint is reproduced bitwise.
inline Path segment_path(const GridFunction& q_end, int P = 33) {
  if (P < 3) throw std::invalid_argument("segment_path: need at least 3 nodes");
  Path h;
  h.nodes.reserve(P);
  for (int k = 0; k < P; ++k) {
    GridFunction g = q_end;
    g.values = (static_cast<double>(k) / (P - 1)) * q_end.values;
    h.nodes.push_back(std::move(g));
  }
  return h;
}

// ---------------------------------------------------------------------------
// probe functions

namespace detail {

// C^2 ramp with value 0 at t = 0 and 1 at t = 1, flat at both ends.
inline double smoother_ramp(double t) { return t * t * t * (10.0 + t * (6.0 * t - 15.0)); }

// Plateau profile: 1 for |x| <= lo, 0 for |x| >= hi, smooth ramp between.
inline double plateau(double x, double lo, double hi) {
  const double a = std::abs(x);
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  return smoother_ramp((hi - a) / (hi - lo));
}

// A family of compactly supported functions spanning several widths, centers
// and shapes (Gaussians, plateaus, windowed transition layers, frozen random
// smooth samples). Each scalar profile is placed into every component slot in
// turn, so anisotropic confinement matrices are probed along each axis. Box
// edge rows stay zero, matching the zero-extension function space.
inline std::vector<GridFunction> embedding_probes(const Grid& grid, int n) {
  std::vector<GridFunction> out;
  const double X = grid.X;
  auto add = [&](auto&& f) {
    for (int j = 0; j < n; ++j) {
      GridFunction q = GridFunction::zeros(grid, n);
      for (int i = 1; i + 1 < grid.N; ++i) q.values(i, j) = f(grid.node(i));
      out.push_back(std::move(q));
    }
  };
  for (double w : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    if (w > 0.5 * X) continue;
    for (double c : {0.0, X / 3.0, -X / 3.0})
      add([=](double x) { return std::exp(-((x - c) / w) * ((x - c) / w)); });
  }
  for (double r : {1.0, 2.0, 4.0}) {
    if (r > X - 0.5) continue;
    add([=](double x) { return plateau(x, 0.5 * r, r); });
  }
  const double cut_lo = std::max(1.0, X - 2.0);
  const double cut_hi = X - 0.5;
  for (double w : {0.5, 2.0})
    add([=](double x) { return std::tanh(x / w) * plateau(x, cut_lo, cut_hi); });
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> uc(-0.5 * X, 0.5 * X);
  std::normal_distribution<double> na(0.0, 1.0);
  for (int rep = 0; rep < 4; ++rep) {
    std::vector<double> cs(5), ws(5), as(5);
    for (int j = 0; j < 5; ++j) {
      cs[j] = uc(rng);
      ws[j] = log_uniform(rng, 0.3, 3.0);
      as[j] = na(rng);
    }
    add([=](double x) {
      double v = 0.0;
      for (int j = 0; j < 5; ++j) v += as[j] * std::exp(-((x - cs[j]) / ws[j]) * ((x - cs[j]) / ws[j]));
      return v;
    });
  }
  return out;
}

}  // namespace detail

// Numerical embedding constant: the largest observed ratio ||q||_{L^r} /
// ||q||_{~H^s} over the probe family, widened by 25 percent. Pass r =
// infinity for the sup norm. The continuous embedding guarantees existence
// of the constant; probing provides a usable value for the geometry radii.
inline double embedding_constant(const ConfinedProblem& prob, double r) {
  const auto probes = detail::embedding_probes(prob.grid, prob.potential.components);
  double best = 0.0;
  for (const auto& q : probes) {
    const double denom = hs_tilde_norm(q, prob.matrix, prob.frac);
    if (!(denom > 1e-14) || !std::isfinite(denom)) continue;
    const double num = std::isinf(r) ? q.sup_norm() : lp_norm(q, r);
    if (std::isfinite(num)) best = std::max(best, num / denom);
  }
  if (!(best > 0.0) || !std::isfinite(best))
    throw std::runtime_error("embedding_constant: probe family yields no finite estimate");
  return 1.25 * best;
}

// ---------------------------------------------------------------------------
// mountain-pass geometry: the ring radius rho and its energy floor beta

struct RhoBeta {
  double rho = 0.0;          // sphere radius in the energy norm
  double beta = 0.0;         // guaranteed I >= beta on that sphere
  double embedding_c = 0.0;  // Lebesgue-vs-energy norm constant actually used
  double delta = 0.0;        // s > 1/2 branch: near-origin quadratic radius
  double sigma = 0.0;        // s <= 1/2 branch: superquadratic coefficient
};

// For s > 1/2 the space embeds into L^infinity, so a sphere of radius
// delta / c_tilde keeps |q| <= delta pointwise; with W <= eps |q|^2 there and
// eps = min{alpha_L, 1}/4 the potential eats at most half the quadratic
// term, leaving I >= rho^2 / 4.
//
// For s <= 1/2 pointwise control fails and the split
//   W <= (eps/2)|q|^2 + (sigma(eps)/p)|q|^p
// is used instead. With eps = 1/(2 c_bar^2) the quadratic part absorbs into
// ||q||^2/4 and the L^p part, converted through the embedding, leaves
//   I >= (1/4)||q||^2 (1 - (4 sigma / p) ||q||^{p-2})
// where sigma carries the factor c_bar^p from the conversion. The radius is
// chosen to make the bracket exactly one half.
inline RhoBeta rho_beta(const ConfinedProblem& prob) {
  prob.validate();
  RhoBeta rb;
  const double s = prob.frac.s;
  if (s > 0.5) {
    const double eps = std::min(prob.matrix.alpha_L, 1.0) / 4.0;
    std::mt19937 rng(7071);
    rb.delta = detail::near_origin_delta(prob.potential.W, prob.potential.components, eps, rng);
    if (!(rb.delta > 0.0))
      throw std::runtime_error("rho_beta: no near-origin quadratic radius found");
    rb.embedding_c = embedding_constant(prob, kInfinity);
    rb.rho = rb.delta / rb.embedding_c;
    rb.beta = 0.25 * rb.rho * rb.rho;
  } else {
    const double p = prob.potential.p;
    if (p > critical_exponent(s) + 1e-12)
      throw std::invalid_argument(
          "rho_beta: growth exponent exceeds the critical embedding exponent");
    rb.embedding_c = std::max(embedding_constant(prob, 2.0), embedding_constant(prob, p));
    const double cb = rb.embedding_c;
    const double sigma_raw = growth_bounds(prob.potential, 1.0 / (2.0 * cb * cb)).sigma;
    rb.sigma = sigma_raw * std::pow(cb, p);
    if (!(rb.sigma > 0.0)) throw std::runtime_error("rho_beta: degenerate growth estimate");
    rb.rho = std::pow(p / (8.0 * rb.sigma), 1.0 / (p - 2.0));
    const double bracket = 1.0 - (4.0 * rb.sigma / p) * std::pow(rb.rho, p - 2.0);
    rb.beta = 0.25 * rb.rho * rb.rho * bracket;
  }
  return rb;
}

// ---------------------------------------------------------------------------
// endpoint construction

// int_a^b inf_{|xi|=1} W(x, xi) dx by panelized Gauss-Legendre. The angular
// infimum can have kinks where the minimizing direction switches, so the
// interval is subdivided before applying the rule.
inline double omega1_integral(const ConfinedPotential& P, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("omega1_integral: need a < b");
  double acc = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double lo = a + (b - a) * k / 8.0;
    const double hi = a + (b - a) * (k + 1) / 8.0;
    acc += gl_panel([&](double x) { return omega1(P, x); }, lo, hi, 64);
  }
  return acc;
}

// Unit-amplitude bump: pointwise norm exactly 1 on [-1, 1], support in
// (-2, 2), smooth ramps between. All components carry the same profile along
// a fixed unit direction.
inline GridFunction bump_profile(const Grid& grid, int components = 1) {
  if (!(grid.X > 2.0))
    throw std::invalid_argument("bump_profile: box must contain the support (-2, 2)");
  GridFunction q = GridFunction::zeros(grid, components);
  const Eigen::VectorXd dir =
      Eigen::VectorXd::Constant(components, 1.0 / std::sqrt(static_cast<double>(components)));
  for (int i = 0; i < grid.N; ++i)
    q.values.row(i) = detail::plateau(grid.node(i), 1.0, 2.0) * dir.transpose();
  return q;
}

// Far endpoint with negative energy. Superquadratic growth gives, for t >= 1,
//   I(t q_bump) <= (t^2/2) ||q_bump||^2 - t^mu int_{-1}^{1} omega_1,
// so any amplitude beyond (2 int omega_1 / ||q_bump||^2)^{1/(2-mu)} makes the
// right side negative; one unit of slack is added, and the amplitude also
// stays beyond the ring radius rho. The returned function is normalized to
// energy-norm t_bar, which can shrink the pointwise amplitude below t_bar
// when ||q_bump|| > 1, so negativity is confirmed numerically and the
// amplitude escalated a few times if needed.
inline GridFunction choose_endpoint(const ConfinedProblem& prob, double rho) {
  const GridFunction bump = bump_profile(prob.grid, prob.potential.components);
  const double bump_norm = hs_tilde_norm(bump, prob.matrix, prob.frac);
  if (!(bump_norm > 0.0) || !std::isfinite(bump_norm))
    throw std::runtime_error("choose_endpoint: bump has no finite energy norm");
  const double w1 = omega1_integral(prob.potential, -1.0, 1.0);
  const double mu = prob.potential.mu;
  double t_bar =
      std::max(rho, std::pow(2.0 * w1 / (bump_norm * bump_norm), 1.0 / (2.0 - mu))) + 1.0;
  for (int attempt = 0;; ++attempt) {
    GridFunction q = bump;
    q.values *= t_bar / bump_norm;
    if (energy_confined(q, prob.potential, prob.matrix, prob.frac).total < 0.0) return q;
    if (attempt >= 4)
      throw std::runtime_error(
          "choose_endpoint: endpoint energy stayed nonnegative (omega1 quadrature failure)");
    t_bar *= 1.5;
  }
}

inline GridFunction choose_endpoint(const ConfinedProblem& prob) {
  return choose_endpoint(prob, rho_beta(prob).rho);
}

// ---------------------------------------------------------------------------
// Palais-Smale norm bound

// Any almost-critical state at level c obeys
//   (mu/2 - 1) ||q||^2 <= mu I(q) - <I'(q), q>,
// because the superquadratic term q . grad W - mu W is nonnegative. At an
// exact critical point this gives ||q|| <= (2 mu c / (mu - 2))^{1/2}.
inline double ps_norm_bound(double c_level, double mu) {
  if (!(mu > 2.0)) throw std::invalid_argument("ps_norm_bound: need mu > 2");
  if (!(c_level >= 0.0)) throw std::invalid_argument("ps_norm_bound: need a nonnegative level");
  return std::sqrt(2.0 * mu * c_level / (mu - 2.0));
}

// ---------------------------------------------------------------------------
// nontriviality audit

struct NontrivialityReport {
  double K = 0.0;
  double beta_K = 0.0;         // inf of the smallest eigenvalue of L beyond [-K, K]
  double gamma = 0.0;          // squared energy norm of the audited function
  double inside_mass = 0.0;    // int_{-K}^{K} |q|^2
  double outside_mass = 0.0;   // discrete L^2 mass beyond [-K, K]
  double outside_bound = 0.0;  // gamma / beta(K)
  double l2_total = 0.0;
  bool outside_within_bound = false;
  bool trivial = false;
};

// Because L diverges at infinity, the mass of any fixed-energy function is
// pinned near the middle:
//   int_{|x|>K} |q|^2 <= (1/beta(K)) int_{|x|>K} L q . q <= gamma / beta(K),
// with beta(K) the smallest eigenvalue of L beyond [-K, K]. A critical point
// at a positive level therefore cannot slide its mass out to infinity; the
// audit reports the split and checks the inequality on the computed state.
inline NontrivialityReport nontriviality_audit(const GridFunction& q, const ConfinedProblem& prob,
                                               double K) {
  if (!(K > 0.0 && K < q.grid.X))
    throw std::invalid_argument("nontriviality_audit: need 0 < K < X");
  if (q.components() != prob.matrix.components)
    throw std::invalid_argument("nontriviality_audit: component mismatch");
  NontrivialityReport r;
  r.K = K;
  const double far = std::max(2.0 * q.grid.X, K + 20.0);
  double beta = kInfinity;
  for (int k = 0; k <= 400; ++k) {
    const double x = K + (far - K) * k / 400.0;
    for (double sx : {x, -x}) {
      const Eigen::MatrixXd M = prob.matrix.L(sx);
      const Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
      beta = std::min(beta, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Ms)
                                .eigenvalues()
                                .minCoeff());
    }
  }
  r.beta_K = beta;
  const double hn = hs_tilde_norm(q, prob.matrix, prob.frac);
  r.gamma = hn * hn;
  const Eigen::VectorXd w = q.grid.trapezoid_weights();
  const double h = q.grid.h();
  double inside = 0.0, total = 0.0;
  for (int i = 0; i < q.grid.N; ++i) {
    const double m = h * w[i] * q.values.row(i).squaredNorm();
    total += m;
    if (std::abs(q.grid.node(i)) <= K + 1e-12) inside += m;
  }
  r.inside_mass = inside;
  r.outside_mass = total - inside;
  r.l2_total = total;
  r.outside_bound = (r.beta_K > 0.0) ? r.gamma / r.beta_K : kInfinity;
  r.outside_within_bound = r.outside_mass <= r.outside_bound + 1e-12 * (1.0 + r.outside_bound);
  r.trivial = total <= 1e-24;
  return r;
}

// ---------------------------------------------------------------------------
// the solver

struct MPOptions {
  int P = 33;               // path nodes for the default segment construction
  int max_sweeps = 600;
  int reparam_every = 50;   // arc-length re-parametrization cadence, 0 disables
  double sweep_tol = 2e-3;  // sup residual at the argmax node ending the sweep stage
  double tol = 1e-4;        // dual-norm residual certified after refinement
  int refine_max_iter = 4000;
  double audit_K = 10.0;    // nontriviality box, clamped below the domain size
  EvalPath path = EvalPath::automatic;
};

struct MPReport {
  double c_est = 0.0;            // final path maximum, the level estimate
  double upper_bound = 0.0;      // max_eta I(eta q_end), joined with the initial path max
  double critical_energy = 0.0;  // I at the refined critical point
  double endpoint_norm = 0.0;    // energy norm of q_end, the segment amplitude
  double w_integral_end = 0.0;   // int W(x, q_end), a certified level majorant
  RhoBeta geometry;              // rho, beta and the embedding constants used
  std::vector<double> level_history;    // path max at each residual record point
  std::vector<double> ps_norm_history;  // energy norm of the recorded argmax state
  double ps_bound_final = 0.0;          // ps_norm_bound at the final level
  double residual_sup = 0.0;            // sup of the Euler-Lagrange residual rows
  double residual_dual = 0.0;           // max |<I'(q), phi>| / ||phi|| over the probes
  double l2_mass = 0.0;
  int sweeps = 0;
  int refine_iterations = 0;
  bool converged = false;
  NontrivialityReport nontriviality;
  Path final_path;                    // the deformed path at exit, endpoints untouched
  std::vector<double> path_energies;  // I at each final path node
};

// Deforms the path downhill and refines the argmax state into a critical
// point. Level bookkeeping is monotone: a node moves only when its energy
// strictly decreases, so the path maximum never increases; arc-length
// re-parametrization is reverted whenever it would raise the maximum.
inline std::pair<GridFunction, MPReport> mountain_pass(const ConfinedProblem& prob,
                                                       const Path& path_init,
                                                       const MPOptions& opts = {}) {
  prob.validate();
  path_init.validate();
  if (!(path_init.nodes.front().grid == prob.grid))
    throw std::invalid_argument("mountain_pass: path grid does not match the problem grid");
  if (path_init.nodes.front().components() != prob.potential.components)
    throw std::invalid_argument("mountain_pass: path components do not match the problem");
  const Grid& grid = prob.grid;
  const int N = grid.N;
  const int n = prob.potential.components;
  for (const auto& node : path_init.nodes)
    if (node.values.row(0).cwiseAbs().maxCoeff() != 0.0 ||
        node.values.row(N - 1).cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("mountain_pass: path nodes must vanish at the box edge");

  const Eigen::VectorXd b = grid.h() * grid.trapezoid_weights();

  // One operator apply serves both the energy and the residual: with the
  // matched quadrature the kinetic term equals (1/2) sum b_i q_i . (A q)_i
  // exactly, and the residual rows are R = A q + L q - grad W.
  auto evaluate = [&](const GridFunction& q, Eigen::MatrixXd* R_out) -> double {
    const Eigen::MatrixXd op = frac_laplacian(q, prob.frac, opts.path);
    double kin = 0.0, conf = 0.0, wint = 0.0;
    if (R_out) *R_out = op;
    for (int i = 0; i < N; ++i) {
      const Eigen::VectorXd qi = q.values.row(i).transpose();
      const double x = grid.node(i);
      const Eigen::VectorXd Lqi = prob.matrix.L(x) * qi;
      kin += 0.5 * b[i] * qi.dot(op.row(i).transpose());
      conf += 0.5 * b[i] * qi.dot(Lqi);
      wint += b[i] * prob.potential.W(x, qi);
      if (R_out) R_out->row(i) += (Lqi - prob.potential.grad(x, qi)).transpose();
    }
    return kin + conf - wint;
  };

  MPReport rep;
  rep.geometry = rho_beta(prob);

  Path path = path_init;
  const int P = static_cast<int>(path.nodes.size());
  const GridFunction& q_end = path.nodes.back();
  rep.endpoint_norm = hs_tilde_norm(q_end, prob.matrix, prob.frac);

  std::vector<double> I(P);
  for (int k = 0; k < P; ++k) I[k] = evaluate(path.nodes[k], nullptr);

  // Upper bound for the level: scan the segment eta -> eta q_end on a fine
  // grid (its quadratic part is eta^2 ||q_end||^2 / 2), then join the initial
  // path maximum so custom initial paths keep the sandwich meaningful.
  {
    const double Q = 0.5 * rep.endpoint_norm * rep.endpoint_norm;
    double best = -kInfinity;
    for (int j = 0; j <= 200; ++j) {
      const double eta = j / 200.0;
      double wint = 0.0;
      for (int i = 0; i < N; ++i)
        wint += b[i] * prob.potential.W(grid.node(i), eta * q_end.values.row(i).transpose());
      best = std::max(best, eta * eta * Q - wint);
      if (j == 200) rep.w_integral_end = wint;
    }
    for (int k = 0; k < P; ++k) best = std::max(best, I[k]);
    rep.upper_bound = best;
  }

  // The running maximum is taken over the nodes and over interpolants inside
  // every segment. Without the interpolants a descent step can push the two
  // nodes flanking the ridge downhill on both sides while the chord between
  // them still crosses the ridge: the node max then sinks below the true
  // min-max level and the argmax drifts down the far slope. Sampling the
  // segments keeps the level estimate attached to the crossing.
  constexpr int kSegSamples = 4;
  constexpr double kTheta = 1.0 / (kSegSamples + 1);
  std::vector<std::array<double, kSegSamples>> seg(P - 1);
  GridFunction scratch = path.nodes.front();
  auto sample_segment = [&](const GridFunction& a, const GridFunction& c,
                            std::array<double, kSegSamples>& out) {
    for (int j = 0; j < kSegSamples; ++j) {
      const double th = (j + 1) * kTheta;
      scratch.values = (1.0 - th) * a.values + th * c.values;
      out[j] = evaluate(scratch, nullptr);
    }
  };
  for (int k = 0; k + 1 < P; ++k) sample_segment(path.nodes[k], path.nodes[k + 1], seg[k]);

  struct MaxLoc {
    double value;
    int node;    // argmax node when sample < 0
    int sample;  // otherwise sample index inside segment [node, node+1]
  };
  auto locate_max = [&]() {
    MaxLoc loc{I[0], 0, -1};
    for (int k = 1; k < P; ++k)
      if (I[k] > loc.value) loc = MaxLoc{I[k], k, -1};
    for (int k = 0; k + 1 < P; ++k)
      for (int j = 0; j < kSegSamples; ++j)
        if (seg[k][j] > loc.value) loc = MaxLoc{seg[k][j], k, j};
    return loc;
  };
  auto max_state = [&](const MaxLoc& loc) {
    GridFunction g = path.nodes[loc.node];
    if (loc.sample >= 0) {
      const double th = (loc.sample + 1) * kTheta;
      g.values = (1.0 - th) * path.nodes[loc.node].values +
                 th * path.nodes[loc.node + 1].values;
    }
    return g;
  };
  auto check_collapse = [&](double c) {
    if (c < rep.geometry.beta * (1.0 - 1e-12) - 1e-15)
      throw std::runtime_error(
          "mountain_pass: path max collapsed below the geometric lower bound");
  };

  double c_est = locate_max().value;
  rep.upper_bound = std::max(rep.upper_bound, c_est);
  check_collapse(c_est);

  // One round of sweeps. Each sweep moves the node nearest the argmax onto
  // the argmax state, then descends a tapered window of nodes around it along
  // their own residuals. A step is accepted only when the sampled path max
  // satisfies an Armijo decrease with the slope of the center state, so the
  // level estimate is monotone by construction and cannot slip off the ridge.
  // The PS history records the argmax state each time its residual reaches a
  // new minimum. A mid-run argmax can sit on the far slope with a large
  // gradient (a leftover hump of the deforming path); such a state belongs to
  // no Palais-Smale sequence and the residual filter skips it, while the
  // states that do converge toward the critical point are all kept.
  double alpha = 1.0;
  double best_rsup = kInfinity;
  auto run_sweeps = [&](double stop_tol) -> int {
    int stagnant = 0;
    int done = 0;
    while (done < opts.max_sweeps) {
      const MaxLoc top = locate_max();
      int jc = top.sample < 0
                   ? top.node
                   : (top.sample + 1 <= kSegSamples / 2 ? top.node : top.node + 1);
      jc = std::clamp(jc, 1, P - 2);
      const GridFunction center = max_state(top);
      Eigen::MatrixXd Rc;
      evaluate(center, &Rc);
      Rc.row(0).setZero();
      Rc.row(N - 1).setZero();
      const double rsup = Rc.cwiseAbs().maxCoeff();
      if (rsup < best_rsup) {
        best_rsup = rsup;
        rep.level_history.push_back(top.value);
        rep.ps_norm_history.push_back(hs_tilde_norm(center, prob.matrix, prob.frac));
      }
      if (rsup <= stop_tol) break;
      ++done;

      constexpr double taper[5] = {0.25, 0.7, 1.0, 0.7, 0.25};
      const int wlo = std::max(1, jc - 2), whi = std::min(P - 2, jc + 2);
      std::vector<Eigen::MatrixXd> RW(whi - wlo + 1);
      for (int k = wlo; k <= whi; ++k) {
        if (k == jc) {
          RW[k - wlo] = Rc;
        } else {
          evaluate(path.nodes[k], &RW[k - wlo]);
          RW[k - wlo].row(0).setZero();
          RW[k - wlo].row(N - 1).setZero();
        }
      }
      double slope = 0.0;
      for (int i = 1; i + 1 < N; ++i) slope -= b[i] * Rc.row(i).squaredNorm();

      alpha = std::min(alpha * 1.5, 1e6);
      bool accepted = false;
      const int slo = std::max(0, wlo - 1), shi = std::min(P - 2, whi);
      std::vector<GridFunction> tnodes(whi - wlo + 1, scratch);
      std::vector<double> tI(whi - wlo + 1);
      std::vector<std::array<double, kSegSamples>> tseg(shi - slo + 1);
      for (int bt = 0; bt < 45; ++bt) {
        double tmax = -kInfinity;
        for (int k = wlo; k <= whi; ++k) {
          GridFunction& t = tnodes[k - wlo];
          t = (k == jc) ? center : path.nodes[k];
          t.values -= alpha * taper[k - jc + 2] * RW[k - wlo];
          tI[k - wlo] = evaluate(t, nullptr);
          tmax = std::max(tmax, tI[k - wlo]);
        }
        auto at = [&](int k) -> const GridFunction& {
          return (k >= wlo && k <= whi) ? tnodes[k - wlo] : path.nodes[k];
        };
        for (int k = slo; k <= shi; ++k) {
          sample_segment(at(k), at(k + 1), tseg[k - slo]);
          for (int j = 0; j < kSegSamples; ++j) tmax = std::max(tmax, tseg[k - slo][j]);
        }
        for (int k = 0; k < P; ++k)
          if (k < wlo || k > whi) tmax = std::max(tmax, I[k]);
        for (int k = 0; k + 1 < P; ++k)
          if (k < slo || k > shi)
            for (int j = 0; j < kSegSamples; ++j) tmax = std::max(tmax, seg[k][j]);
        if (std::isfinite(tmax) && tmax < c_est + 1e-4 * alpha * slope) {
          for (int k = wlo; k <= whi; ++k) {
            path.nodes[k] = std::move(tnodes[k - wlo]);
            I[k] = tI[k - wlo];
          }
          for (int k = slo; k <= shi; ++k) seg[k] = tseg[k - slo];
          c_est = tmax;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (accepted) {
        stagnant = 0;
      } else if (++stagnant >= 25) {
        break;
      }

      // Re-parametrize by arc length in the energy norm so the nodes do not
      // cluster at the flat ends of the path; revert if the max rises.
      if (opts.reparam_every > 0 && done % opts.reparam_every == 0) {
        std::vector<double> len(P, 0.0);
        for (int k = 1; k < P; ++k) {
          GridFunction d = path.nodes[k];
          d.values -= path.nodes[k - 1].values;
          len[k] = len[k - 1] + hs_tilde_norm(d, prob.matrix, prob.frac);
        }
        if (len[P - 1] > 0.0) {
          std::vector<GridFunction> fresh = path.nodes;
          std::vector<double> fresh_I = I;
          int j = 0;
          for (int k = 1; k < P - 1; ++k) {
            const double target = len[P - 1] * k / (P - 1);
            while (j + 2 < P && len[j + 1] < target) ++j;
            const double span = len[j + 1] - len[j];
            const double th = span > 0.0 ? (target - len[j]) / span : 0.0;
            fresh[k].values =
                (1.0 - th) * path.nodes[j].values + th * path.nodes[j + 1].values;
            fresh_I[k] = evaluate(fresh[k], nullptr);
          }
          std::vector<std::array<double, kSegSamples>> fresh_seg(P - 1);
          double fresh_max = *std::max_element(fresh_I.begin(), fresh_I.end());
          for (int k = 0; k + 1 < P; ++k) {
            sample_segment(fresh[k], fresh[k + 1], fresh_seg[k]);
            for (int j2 = 0; j2 < kSegSamples; ++j2)
              fresh_max = std::max(fresh_max, fresh_seg[k][j2]);
          }
          if (fresh_max <= c_est + 1e-12 * (1.0 + std::abs(c_est))) {
            path.nodes = std::move(fresh);
            I = std::move(fresh_I);
            seg = std::move(fresh_seg);
            c_est = fresh_max;
          }
        }
      }

      check_collapse(c_est);
    }
    return done;
  };

  // Saddle refinement: minimize Phi(q) = (1/2) sum b_i |R_i|^2 over the
  // interior node values. With the symmetric weighted Jacobian of R the
  // gradient is b (J R), and J R is a central difference of the residual
  // along the residual itself, two extra operator applies per gradient.
  GridFunction q_crit = path.nodes.front();
  const int m = (N - 2) * n;
  Eigen::VectorXd x(m);
  GridFunction work = q_crit;
  auto unpack = [&](const Eigen::VectorXd& v, GridFunction& g) {
    g.values.row(0).setZero();
    g.values.row(N - 1).setZero();
    for (int i = 1; i + 1 < N; ++i)
      for (int j = 0; j < n; ++j) g.values(i, j) = v[(i - 1) * n + j];
  };
  auto residual_rows = [&](const GridFunction& q) {
    Eigen::MatrixXd R;
    evaluate(q, &R);
    return R;
  };
  auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& gr) -> double {
    unpack(v, work);
    Eigen::MatrixXd R = residual_rows(work);
    R.row(0).setZero();
    R.row(N - 1).setZero();
    double phi = 0.0;
    for (int i = 1; i + 1 < N; ++i) phi += 0.5 * b[i] * R.row(i).squaredNorm();
    gr.resize(m);
    const double rn = R.cwiseAbs().maxCoeff();
    if (rn < 1e-300) {
      gr.setZero();
      return phi;
    }
    const double tau = 1e-6 * (1.0 + work.sup_norm()) / rn;
    GridFunction qp = work, qm = work;
    qp.values += tau * R;
    qm.values -= tau * R;
    const Eigen::MatrixXd JR = (residual_rows(qp) - residual_rows(qm)) / (2.0 * tau);
    for (int i = 1; i + 1 < N; ++i)
      for (int j = 0; j < n; ++j) gr[(i - 1) * n + j] = b[i] * JR(i, j);
    return phi;
  };
  detail::LbfgsOptions lo;
  lo.max_iter = opts.refine_max_iter;
  lo.grad_tol = 1e-17;
  lo.memory = 12;
  // The dual residual is at most embedding_c * sqrt(2 Phi), so stopping once
  // Phi falls two orders below the corresponding target loses nothing.
  {
    const double ce = std::max(rep.geometry.embedding_c, 1e-6);
    const double target = 0.01 * opts.tol / ce;
    lo.f_floor = 0.5 * target * target;
  }
  // The refinement is a local least-squares polish, and the trivial state is
  // a global minimizer of Phi, so a start too far from the saddle can slide
  // off the ridge entirely. Any critical point at level c >= beta satisfies
  // ||q||^2 = 2c + 2 int W >= 2 beta (W >= 0), which gives a clean basin
  // check: a refined state well inside that ball is the trivial root, and the
  // sweep stage gets another round with a tighter stopping residual.
  rep.sweeps = 0;
  rep.refine_iterations = 0;
  const double norm_floor = 0.5 * std::sqrt(2.0 * rep.geometry.beta);
  double stop_tol = opts.sweep_tol;
  for (int round = 0;; ++round) {
    rep.sweeps += run_sweeps(stop_tol);
    c_est = locate_max().value;
    check_collapse(c_est);
    q_crit = max_state(locate_max());
    for (int i = 1; i + 1 < N; ++i)
      for (int j = 0; j < n; ++j) x[(i - 1) * n + j] = q_crit.values(i, j);
    const detail::LbfgsResult lr = detail::lbfgs_minimize(fg, x, lo);
    rep.refine_iterations += lr.iterations;
    unpack(x, q_crit);
    if (hs_tilde_norm(q_crit, prob.matrix, prob.frac) >= norm_floor &&
        evaluate(q_crit, nullptr) >= 0.25 * rep.geometry.beta)
      break;
    if (round >= 2)
      throw std::runtime_error(
          "mountain_pass: residual stagnation, refinement fell off the ridge "
          "toward the trivial state");
    stop_tol *= 0.2;
  }

  Eigen::MatrixXd R = residual_rows(q_crit);
  R.row(0).setZero();
  R.row(N - 1).setZero();
  rep.residual_sup = R.cwiseAbs().maxCoeff();
  rep.critical_energy = evaluate(q_crit, nullptr);

  // Dual-norm residual over a probe battery: with the matched quadrature
  // <I'(q), phi> = sum b_i phi_i . R_i exactly, so each probe costs one
  // weighted inner product plus its own norm.
  {
    std::vector<GridFunction> probes = detail::embedding_probes(grid, n);
    GridFunction extra = q_crit;
    probes.push_back(extra);
    extra.values = R;
    probes.push_back(extra);
    double worst = 0.0;
    for (const auto& phi : probes) {
      const double pn = hs_tilde_norm(phi, prob.matrix, prob.frac);
      if (!(pn > 1e-14) || !std::isfinite(pn)) continue;
      double pair = 0.0;
      for (int i = 0; i < N; ++i) pair += b[i] * phi.values.row(i).dot(R.row(i));
      worst = std::max(worst, std::abs(pair) / pn);
    }
    rep.residual_dual = worst;
  }
  if (rep.residual_dual > opts.tol)
    throw std::runtime_error("mountain_pass: residual stagnation, dual residual " +
                             std::to_string(rep.residual_dual) + " above tolerance " +
                             std::to_string(opts.tol));
  rep.converged = true;

  rep.c_est = c_est;
  rep.level_history.push_back(c_est);
  rep.ps_norm_history.push_back(hs_tilde_norm(q_crit, prob.matrix, prob.frac));
  rep.ps_bound_final = ps_norm_bound(std::max(c_est, 0.0), prob.potential.mu);
  rep.l2_mass = lp_norm(q_crit, 2.0);
  rep.nontriviality =
      nontriviality_audit(q_crit, prob, std::min(opts.audit_K, 0.8 * grid.X));
  rep.final_path = std::move(path);
  rep.path_energies = std::move(I);
  if (!(rep.geometry.beta <= c_est * (1.0 + 1e-12) + 1e-15) ||
      !(c_est <= rep.upper_bound + 1e-12 * (1.0 + std::abs(rep.upper_bound))))
    throw std::logic_error("mountain_pass: level sandwich violated on exit");
  return {std::move(q_crit), rep};
}

inline std::pair<GridFunction, MPReport> mountain_pass(const ConfinedProblem& prob,
                                                       const MPOptions& opts = {}) {
  const RhoBeta rb = rho_beta(prob);
  return mountain_pass(prob, segment_path(choose_endpoint(prob, rb.rho), opts.P), opts);
}

}  // namespace fraclinic
