#include "doctest.h"

#include "fraclinic/certify.hpp"

#include <cmath>
#include <random>

using namespace fraclinic;

namespace {

ConfinedProblem cubic_problem(double s, double X, int N) {
  ConfinedProblem prob;
  prob.frac.s = s;
  prob.frac.c_s = cs_constant(s);
  prob.grid = Grid(X, N);
  PotentialParams pp;
  pp.shift = 1.0;
  pp.eps = 1.0;
  prob.potential = builtin_library().make_confined("power-w", pp);
  prob.matrix = builtin_library().make_matrix("harmonic", pp);
  return prob;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int m = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

// ---------------------------------------------------------------------------
// truncation iteration

TEST_CASE("degiorgi: zero trajectory certifies the zero bound") {
  const ConfinedProblem prob = cubic_problem(0.4, 8.0, 129);
  const GridFunction q = GridFunction::zeros(prob.grid, 1);
  const DeGiorgiTrace tr = degiorgi_verify(q, prob);
  CHECK(tr.bound == 0.0);
  CHECK(tr.lt_norm == 0.0);
  CHECK(tr.sup_direct == 0.0);
  CHECK(tr.delta > 0.0);
  CHECK(tr.delta < 1.0);
  for (double U : tr.masses) CHECK(U == 0.0);
}

TEST_CASE("degiorgi: level ladder on a decaying profile") {
  // a narrow peak keeps the sup above the L^t norm, so the accepted scale
  // sits at an interior boundary rather than at the cap
  const ConfinedProblem prob = cubic_problem(0.4, 12.0, 257);
  GridFunction q = GridFunction::zeros(prob.grid, 1);
  for (int i = 0; i < prob.grid.N; ++i) {
    const double x = prob.grid.node(i);
    q.values(i, 0) = 1.3 * std::exp(-8.0 * x * x);
  }
  const int k_max = 30;
  const DeGiorgiTrace tr = degiorgi_verify(q, prob, k_max);
  REQUIRE(tr.delta < 1.0 - 1e-9);

  CHECK(tr.t == doctest::Approx(10.0).epsilon(1e-15));  // 2 / (1 - 2 s) at s = 0.4
  REQUIRE(static_cast<int>(tr.masses.size()) == k_max + 1);
  CHECK(tr.lt_norm == doctest::Approx(lp_norm(q, tr.t)).epsilon(1e-15));
  CHECK(tr.bound == doctest::Approx(tr.lt_norm / tr.delta).epsilon(1e-14));
  CHECK(tr.bound >= tr.sup_direct);
  CHECK(tr.sup_direct == q.sup_norm());

  // the scaled profile has unit L^t norm, so the first mass is delta^t itself
  CHECK(tr.masses[0] <= std::pow(tr.delta, tr.t) * (1.0 + 1e-12));
  CHECK(tr.masses[0] == doctest::Approx(std::pow(tr.delta, tr.t)).epsilon(1e-10));

  // the masses shrink along the ladder, reach exactly zero at the top, and
  // every observed ratio sits under the reported envelope rate
  CHECK(tr.masses[k_max] == 0.0);
  CHECK(tr.mu_dg < 1.0);
  CHECK(tr.mu_dg > 0.0);
  for (int k = 1; k <= k_max; ++k) {
    CHECK(tr.masses[k] <= tr.masses[k - 1]);
    if (k >= 2 && tr.masses[k - 1] > 0.0)
      CHECK(tr.masses[k] <= tr.mu_dg * tr.masses[k - 1] * (1.0 + 1e-12));
  }

  // maximality: a few percent above the accepted scale the top mass survives,
  // so the bisection stopped at the boundary
  const Eigen::MatrixXd phi_hat = q.values.cwiseAbs() / tr.lt_norm;
  const Eigen::VectorXd w = prob.grid.trapezoid_weights();
  const double h = prob.grid.h();
  const double A_top = 1.0 - std::ldexp(1.0, -k_max);
  double top = 0.0;
  for (int i = 0; i < prob.grid.N; ++i) {
    const double excess = 1.02 * tr.delta * phi_hat(i, 0) - A_top;
    if (excess > 0.0) top += h * w[i] * std::pow(excess, tr.t);
  }
  CHECK(top > 0.0);

  // a spread-out plateau has L^t norm above its sup; the scale then accepts
  // the cap and the certified bound is the norm itself
  GridFunction flat = bump_profile(prob.grid);
  flat.values *= 1.3;
  const DeGiorgiTrace cap = degiorgi_verify(flat, prob, k_max);
  CHECK(cap.delta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cap.bound >= cap.sup_direct);
  CHECK(cap.bound == doctest::Approx(cap.lt_norm).epsilon(1e-9));
}

TEST_CASE("degiorgi: nodewise truncation identities at the accepted scale") {
  const ConfinedProblem prob = cubic_problem(0.3, 10.0, 193);
  GridFunction q = bump_profile(prob.grid);
  q.values *= 2.0;
  const DeGiorgiTrace tr = degiorgi_verify(q, prob, 24);

  const int N = prob.grid.N;
  Eigen::VectorXd phi(N);
  for (int i = 0; i < N; ++i) phi(i) = tr.delta * std::abs(q.values(i, 0)) / tr.lt_norm;
  for (int k = 0; k < 8; ++k) {
    const double Ak = 1.0 - std::ldexp(1.0, -k);
    const double Ak1 = 1.0 - std::ldexp(1.0, -(k + 1));
    for (int i = 0; i < N; ++i) {
      const double wk = std::max(phi(i) - Ak, 0.0);
      const double wk1 = std::max(phi(i) - Ak1, 0.0);
      // truncations at deeper levels only lose mass
      CHECK(wk1 <= wk);
      if (wk1 > 0.0) {
        // a node alive at level k+1 already clears the gap at level k
        CHECK(wk > std::ldexp(1.0, -(k + 1)));
        // and its profile value is pinched by the previous truncation
        CHECK(phi(i) > 0.0);
        CHECK(phi(i) < std::ldexp(1.0, k + 1) * wk);
      }
    }
  }
}

TEST_CASE("degiorgi: balance-point exponent is configurable, refusals are typed") {
  ConfinedProblem prob = cubic_problem(0.5, 8.0, 129);
  GridFunction q = bump_profile(prob.grid);
  CHECK(degiorgi_verify(q, prob).t == 4.0);
  prob.t_exponent = 6.0;
  CHECK(degiorgi_verify(q, prob).t == 6.0);

  const ConfinedProblem sup_range = cubic_problem(0.6, 8.0, 129);
  CHECK_THROWS_AS(degiorgi_verify(q, sup_range), std::invalid_argument);
  CHECK_THROWS_AS(degiorgi_verify(q, prob, 1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// banded elimination

TEST_CASE("banded factorization agrees with the dense solver") {
  const int N = 200, kb = 7;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(2 * kb + 1, N);
  for (int i = 0; i < N; ++i) {
    for (int j = std::max(0, i - kb); j <= std::min(N - 1, i + kb); ++j) {
      const double a = (i == j) ? 20.0 + ud(rng) : ud(rng);
      dense(i, j) = a;
      band(kb + i - j, j) = a;
    }
  }
  Eigen::VectorXd rhs(N);
  for (int i = 0; i < N; ++i) rhs[i] = ud(rng);

  Eigen::VectorXd x = rhs;
  detail::BandedLU(band, kb).solve_in_place(x);
  const Eigen::VectorXd ref = Eigen::PartialPivLU<Eigen::MatrixXd>(dense).solve(rhs);
  CHECK((x - ref).cwiseAbs().maxCoeff() <= 1e-11 * ref.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(detail::BandedLU(Eigen::MatrixXd::Zero(2 * kb + 1, N), kb),
                  std::runtime_error);
}

TEST_CASE("banded operator assembly matches the dense constant-extension matrix") {
  const Grid g(25.0, 101);
  const FracParams fp(0.35);
  const DifferenceWeights W(g, fp);
  const int kb = 10;
  const Eigen::MatrixXd band = detail::layer_operator_band(W, kb);
  const Eigen::MatrixXd dense = frac_operator_matrix_const_ext(W);
  // the truncation keeps every in-band entry of the dense matrix, the exact
  // diagonal included
  for (int i = 0; i < g.N; ++i)
    for (int j = std::max(0, i - kb); j <= std::min(g.N - 1, i + kb); ++j)
      CHECK(band(kb + i - j, j) == doctest::Approx(dense(i, j)).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// transition layer

TEST_CASE("layer profile: centered odd solution through the wells") {
  const Grid g(20.0, 801);
  const LayerProfile lp = layer_solution(0.4, g);
  const int N = g.N;

  CHECK(lp.newton_iterations > 0);
  CHECK(lp.residual_sup <= 1e-8);
  CHECK(lp.edge_defect <= 0.05);
  CHECK(lp.beta_tilde.values((N - 1) / 2, 0) == 0.0);
  for (int i = 0; i < N; ++i)
    CHECK(lp.beta_tilde.values(i, 0) == -lp.beta_tilde.values(N - 1 - i, 0));
  for (int i = 0; i + 1 < N; ++i)
    CHECK(lp.beta_tilde.values(i + 1, 0) > lp.beta_tilde.values(i, 0));
  CHECK(lp.beta_layer.values.minCoeff() > 0.0);

  // fundamental theorem on the grid: the trapezoid sum of the centered
  // differences telescopes exactly to the boundary jump, which in turn sits
  // within twice the edge defect of the full transition
  const Eigen::VectorXd w = g.trapezoid_weights();
  double mass = 0.0;
  for (int i = 0; i < N; ++i) mass += g.h() * w[i] * lp.beta_layer.values(i, 0);
  const double jump = lp.beta_tilde.values(N - 1, 0) - lp.beta_tilde.values(0, 0);
  CHECK(mass == doctest::Approx(jump).epsilon(1e-12));
  CHECK(std::abs(mass - 2.0) <= 2.0 * lp.edge_defect + 1e-12);

  // the zero-order coefficient is already deep below -1 at the box edge
  const double a_edge = 1.0 - 3.0 * lp.beta_tilde.values(N - 1, 0) * lp.beta_tilde.values(N - 1, 0);
  CHECK(a_edge <= -1.7);
  CHECK(a_edge >= -2.0 - 1e-9);

  CHECK_THROWS_AS(layer_solution(0.4, Grid(16.0, 257)), std::invalid_argument);
}

TEST_CASE("layer profile: kernel-driven tail at small s") {
  // wide box, banded elimination and transform evaluation throughout
  const Grid g(4200.0, 42001);
  const LayerProfile lp = layer_solution(0.25, g);
  const int N = g.N;

  CHECK(lp.residual_sup <= 1e-8);
  CHECK(lp.beta_layer.values.minCoeff() > 0.0);

  // far field of the derivative follows the kernel power 1 + 2s
  std::vector<double> lx, ly;
  for (int i = 0; i < N; ++i) {
    const double x = g.node(i);
    if (x < 100.0 || x > 1000.0) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(lp.beta_layer.values(i, 0)));
  }
  REQUIRE(lx.size() > 100);
  const double slope = least_squares_slope(lx, ly);
  CHECK(std::abs(slope + 1.5) <= 0.2);

  // the zero-order coefficient has settled at its limit by the box edge
  const double bT = lp.beta_tilde.values(N - 1, 0);
  CHECK(std::abs((1.0 - 3.0 * bT * bT) + 2.0) <= 0.05);

  const Eigen::VectorXd w = g.trapezoid_weights();
  double mass = 0.0;
  for (int i = 0; i < N; ++i) mass += g.h() * w[i] * lp.beta_layer.values(i, 0);
  CHECK(std::abs(mass - 2.0) <= 0.05);
}

TEST_CASE("layer profile: small-s boundary drift is caught, not returned") {
  // at s = 1/4 the tails relax so slowly that X = 25 cannot hold the wells
  CHECK_THROWS_AS(layer_solution(0.25, Grid(25.0, 501)), std::runtime_error);
}

// ---------------------------------------------------------------------------
// decay barriers

TEST_CASE("barrier: zero trajectory needs no amplitude") {
  const ConfinedProblem prob = cubic_problem(0.4, 20.0, 801);
  const GridFunction q = GridFunction::zeros(prob.grid, 1);
  const BarrierCertificate cert = build_barrier(q, prob, 0.1, 2.0);

  CHECK(cert.pass);
  CHECK(cert.A_R0 == 0.0);
  CHECK(cert.A == 0.0);
  CHECK(cert.C_s > 0.0);
  CHECK(cert.varsigma > 0.0);
  CHECK(cert.R0 >= 1.0);
  CHECK(cert.R0 <= prob.grid.X);
  // with no amplitude both barriers reduce to the slack profile, minimized
  // at the origin where 1 + |x|^s = 1
  CHECK(cert.v_min[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(cert.w_min[0] == doctest::Approx(0.1).epsilon(1e-12));
  // the layer coefficient stays inside its stated range
  CHECK(cert.coefficient_a.values.maxCoeff() <= 1.0 + 1e-12);
  CHECK(cert.coefficient_a.values.minCoeff() >= -2.0 - 1e-9);

  CHECK_THROWS_AS(build_barrier(q, prob, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_barrier(q, prob, 0.1, 1.0), std::invalid_argument);
  const ConfinedProblem sup_range = cubic_problem(0.75, 20.0, 801);
  CHECK_THROWS_AS(build_barrier(q, sup_range, 0.1, 2.0), std::invalid_argument);
}

TEST_CASE("barrier: decaying bump passes and minima climb with amplitude") {
  const ConfinedProblem prob = cubic_problem(0.4, 20.0, 801);
  GridFunction q = bump_profile(prob.grid);
  q.values *= 1.5;
  const LayerProfile layer = layer_solution(prob.frac.s, prob.grid);

  const BarrierCertificate c15 = build_barrier(q, prob, layer, 0.1, 1.5);
  const BarrierCertificate c20 = build_barrier(q, prob, layer, 0.1, 2.0);
  const BarrierCertificate c30 = build_barrier(q, prob, layer, 0.1, 3.0);
  CHECK(c15.pass);
  CHECK(c20.pass);
  CHECK(c30.pass);

  // the radii bookkeeping: threshold radius of 1 + x^2 against the growth
  // constant, amplitude tied to the measured sup
  const double threshold = 3.0 + 1.0 * (1.0 + q.sup_norm());
  CHECK(c20.R_bar > std::sqrt(threshold - 1.0));
  CHECK(c20.R_bar <= std::sqrt(threshold - 1.0) + prob.grid.h() + 1e-12);
  CHECK(c20.R0 >= c20.R_bar);
  CHECK(c20.R0 >= c20.R_tilde);
  CHECK(c20.A_R0 == doctest::Approx(q.sup_norm() / c20.varsigma).epsilon(1e-13));
  CHECK(c20.A == doctest::Approx(2.0 * c20.A_R0).epsilon(1e-13));

  // minima are monotone in the amplitude: the layer weight is positive
  CHECK(c20.v_min[0] >= c15.v_min[0]);
  CHECK(c30.v_min[0] >= c20.v_min[0]);
  CHECK(c20.w_min[0] >= c15.w_min[0]);
  CHECK(c30.w_min[0] >= c20.w_min[0]);

  // slack sweep toward zero: the amplitude term alone pins the trajectory
  const BarrierCertificate s2 = build_barrier(q, prob, layer, 0.01, 2.0);
  const BarrierCertificate s3 = build_barrier(q, prob, layer, 0.001, 2.0);
  CHECK(s2.pass);
  CHECK(s3.pass);
  double worst = -1e300;
  for (int i = 0; i < prob.grid.N; ++i)
    worst = std::max(worst,
                     std::abs(q.values(i, 0)) - s3.A * layer.beta_layer.values(i, 0));
  CHECK(worst <= 0.001 * (1.0 + std::pow(prob.grid.X, prob.frac.s)) + 1e-8);
}

TEST_CASE("barrier: failure modes separate small boxes from bad decay") {
  // confinement diagonal grows too slowly to clear its threshold inside the box
  ConfinedProblem slow = cubic_problem(0.4, 20.0, 801);
  slow.matrix.L = [](double x) {
    return (Eigen::MatrixXd(1, 1) << 1.0 + x * x / 400.0).finished();
  };
  slow.matrix.d_j.clear();
  slow.matrix.d_j.push_back([](double x) { return 1.0 + x * x / 400.0; });
  GridFunction q = bump_profile(slow.grid);
  CHECK_THROWS_AS(build_barrier(q, slow, 0.1, 2.0), std::runtime_error);

  // a trajectory that never decays: fails quietly under a modest amplitude,
  // loudly at a comfortable one
  const ConfinedProblem prob = cubic_problem(0.4, 20.0, 801);
  GridFunction flat = GridFunction::zeros(prob.grid, 1);
  flat.values.setOnes();
  const LayerProfile layer = layer_solution(prob.frac.s, prob.grid);
  const BarrierCertificate weak = build_barrier(flat, prob, layer, 0.1, 1.5);
  CHECK_FALSE(weak.pass);
  CHECK(weak.v_min.minCoeff() < -1e-8);
  CHECK_THROWS_AS(build_barrier(flat, prob, layer, 0.1, 2.0), std::runtime_error);
}

// ---------------------------------------------------------------------------
// positive part membership

TEST_CASE("positive part: level above the profile truncates to zero") {
  const Grid g(8.0, 129);
  const FracParams fp(0.4);
  const ConfinementMatrix L = builtin_library().make_matrix("harmonic", PotentialParams{});
  GridFunction q = bump_profile(g);
  q.values *= 0.3;
  const PositivePartReport rep = positive_part_membership(q, L, fp, 0.5);
  CHECK(rep.norm_u == 0.0);
  CHECK(rep.seminorm_sq_u == 0.0);
  CHECK(rep.confinement_u == 0.0);
  CHECK(rep.seminorm_contracts);
  CHECK(rep.confinement_bounded);
  CHECK(rep.in_space);

  CHECK_THROWS_AS(positive_part_membership(q, L, fp, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(positive_part_membership(q, L, fp, -1.0), std::invalid_argument);
}

TEST_CASE("positive part: contraction and confinement bound on random data") {
  const Grid g(10.0, 193);
  const FracParams fp(0.4);
  PotentialParams pp;
  pp.components = 2;
  const ConfinementMatrix L = builtin_library().make_matrix("harmonic", pp);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep_i = 0; rep_i < 20; ++rep_i) {
    GridFunction q = GridFunction::zeros(g, 2);
    for (int i = 1; i + 1 < g.N; ++i)
      for (int j = 0; j < 2; ++j)
        q.values(i, j) = nd(rng) * std::exp(-0.25 * g.node(i) * g.node(i));
    const PositivePartReport rep = positive_part_membership(q, L, fp, 0.5);
    CHECK(rep.seminorm_contracts);
    CHECK(rep.confinement_bounded);
    CHECK(rep.in_space);
    CHECK(rep.seminorm_sq_u <= rep.seminorm_sq_q * (1.0 + 1e-12) + 1e-15);
  }
}

TEST_CASE("positive part: vanishing level recovers the nonnegative profile") {
  const Grid g(10.0, 257);
  const FracParams fp(0.4);
  const ConfinementMatrix L = builtin_library().make_matrix("harmonic", PotentialParams{});
  GridFunction q = bump_profile(g);
  q.values = q.values.cwiseAbs();
  const double norm_q = hs_tilde_norm(q, L, fp);

  const PositivePartReport r1 = positive_part_membership(q, L, fp, 0.1);
  const PositivePartReport r2 = positive_part_membership(q, L, fp, 0.01);
  const double d1 = std::abs(r1.norm_u - norm_q);
  const double d2 = std::abs(r2.norm_u - norm_q);
  CHECK(d2 < d1);
  CHECK(d2 <= 0.1 * (1.0 + norm_q));
}

TEST_CASE("positive part: off-diagonal coupling can defeat the confinement bound") {
  // constant two-component state (3, -4): truncation above level 1 leaves
  // (2, 0), and against the all-ones matrix the mixed terms flip the
  // comparison: (3 - 4)^2 = 1 on every node against (2 + 0)^2 = 4
  const Grid g(8.0, 65);
  const FracParams fp(0.3);
  Eigen::MatrixXd vals(g.N, 2);
  vals.col(0).setConstant(3.0);
  vals.col(1).setConstant(-4.0);
  const GridFunction q(g, vals);
  ConfinementMatrix ones;
  ones.L = [](double) { return Eigen::MatrixXd::Ones(2, 2); };
  ones.nonneg_entries = true;
  ones.components = 2;
  const PositivePartReport rep = positive_part_membership(q, ones, fp, 1.0);
  CHECK(rep.seminorm_contracts);
  CHECK_FALSE(rep.confinement_bounded);
  CHECK(rep.confinement_q == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(rep.confinement_u == doctest::Approx(64.0).epsilon(1e-12));

  // the same truncation against a diagonal matrix keeps the bound
  ConfinementMatrix diag;
  diag.L = [](double) { return Eigen::MatrixXd::Identity(2, 2).eval(); };
  diag.nonneg_entries = true;
  diag.components = 2;
  const PositivePartReport drep = positive_part_membership(q, diag, fp, 1.0);
  CHECK(drep.confinement_bounded);
  CHECK(drep.seminorm_contracts);
}
