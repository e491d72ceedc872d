#include "doctest.h"

#include "fraclinic/pinned_solver.hpp"

#include <cmath>
#include <random>

using namespace fraclinic;

namespace {

PinnedProblem quadratic_problem(double s, double X, int N, double pin_a, double pin_b,
                                double datum_value, double R) {
  PinnedProblem prob;
  prob.frac.s = s;
  prob.frac.c_s = cs_constant(s);
  PotentialParams pp;
  pp.R = R;
  prob.potential = builtin_library().make_pinned("quadratic-well", pp);
  prob.grid = Grid(X, N);
  prob.pin = pin_indices(prob.grid, pin_a, pin_b);
  prob.datum = Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(prob.pin.index_set.size()), 1, datum_value);
  prob.alpha = 0.5;
  return prob;
}

}  // namespace

TEST_CASE("bootstrap recursion reproduces the worked sequence and its closed-form limit") {
  const BootstrapResult r = bootstrap_exponents(0.4, 0.5, 0.4);
  REQUIRE(r.sequence.size() == 3);
  CHECK(r.sequence[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.sequence[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.sequence[2] == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(r.crossed_at == 2);
  CHECK(r.limit == doctest::Approx(1.6).epsilon(1e-15));

  // each increment is at least 2s - 1 + gamma while below one
  for (size_t k = 1; k < r.sequence.size(); ++k)
    CHECK(r.sequence[k] - r.sequence[k - 1] >= 2.0 * 0.4 - 1.0 + 0.5 - 1e-12);

  CHECK(bootstrap_exponents(0.3, 0.999, 0.3).limit == doctest::Approx(600.0).epsilon(1e-10));

  CHECK_THROWS_AS(bootstrap_exponents(0.3, 0.4, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_exponents(0.25, 0.5, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_exponents(0.4, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_exponents(0.4, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_exponents(0.4, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("scaling experiment reproduces the frozen slopes for the double-log profile") {
  const std::vector<double> eps{1.0, 0.5, 0.25, 0.125};
  const ScalingResult r25 = scaling_experiment(0.25, -1.0, eps);
  const ScalingResult r40 = scaling_experiment(0.4, -1.0, eps);
  const ScalingResult r50 = scaling_experiment(0.5, -1.0, eps);
  CHECK(r25.slope == doctest::Approx(0.5113099759997607).epsilon(1e-6));
  CHECK(r40.slope == doctest::Approx(0.2125242790317417).epsilon(1e-6));
  CHECK(r50.slope == doctest::Approx(1.7514930128409711).epsilon(1e-6));
  CHECK(r50.decreasing);
  for (double e : r50.energy) CHECK(e > 0.0);

  CHECK_THROWS_AS(scaling_experiment(0.6, -1.0, eps), std::invalid_argument);
  CHECK_THROWS_AS(scaling_experiment(0.4, 0.5, eps), std::invalid_argument);
  CHECK_THROWS_AS(scaling_experiment(0.4, -1.0, {0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_experiment(0.4, -1.0, {0.5}), std::invalid_argument);
}

TEST_CASE("Holder seminorm: constants, the square root cusp, and refinement blow-up") {
  const Grid g(2.0, 257);
  const GridFunction c(g, Eigen::MatrixXd::Constant(g.N, 1, 3.7), Extension::constant_tail);
  CHECK(holder_seminorm(c, 0.5).seminorm == 0.0);
  CHECK(holder_seminorm(c, 0.5).sup == doctest::Approx(3.7));

  auto sqrt_profile = [](const Grid& gr) {
    Eigen::MatrixXd v(gr.N, 1);
    for (int i = 0; i < gr.N; ++i) v(i, 0) = std::sqrt(std::abs(gr.node(i)));
    return v;
  };
  const GridFunction q(g, sqrt_profile(g), Extension::constant_tail);
  CHECK(holder_seminorm(q, 0.5).seminorm == doctest::Approx(1.0).epsilon(1e-12));

  // at a too-optimistic exponent the seminorm grows under refinement
  const Grid g2(2.0, 1025);
  const GridFunction q2(g2, sqrt_profile(g2), Extension::constant_tail);
  const double a = holder_seminorm(q, 0.6).seminorm;
  const double b = holder_seminorm(q2, 0.6).seminorm;
  CHECK(b > 1.1 * a);

  CHECK_THROWS_AS(holder_seminorm(q, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(holder_seminorm(q, 1.5), std::invalid_argument);
}

TEST_CASE("decay margins: zero profile, algebraic tail exponent, window validation") {
  const Grid g(12.0, 769);
  CHECK(check_decay(GridFunction::zeros(g), 4.0).value_right == 0.0);
  CHECK(check_decay(GridFunction::zeros(g), 4.0).tail_exponent == 0.0);

  Eigen::MatrixXd v(g.N, 1);
  for (int i = 0; i < g.N; ++i) v(i, 0) = 1.0 / (1.0 + g.node(i) * g.node(i));
  const GridFunction q(g, v, Extension::zero);
  const DecayMargins m = check_decay(q, 4.0);
  CHECK(m.value_right == doctest::Approx(1.0 / (1.0 + 64.0)).epsilon(1e-10));
  CHECK(m.value_left == m.value_right);
  CHECK(m.tail_exponent == doctest::Approx(2.0).epsilon(0.05));
  CHECK(m.deriv_right > 0.0);
  CHECK(m.deriv_right < m.value_right);

  CHECK_THROWS_AS(check_decay(q, 12.0), std::invalid_argument);
  CHECK_THROWS_AS(check_decay(q, 0.0), std::invalid_argument);
}

TEST_CASE("even symmetrization: fixed point on even input, exactly even output, no energy gain") {
  const Grid g(6.0, 193);
  FracParams params;
  params.s = 0.6;
  params.c_s = cs_constant(params.s);
  PotentialParams pp;
  const PinnedPotential V = builtin_library().make_pinned("quadratic-well", pp);

  Eigen::MatrixXd even(g.N, 1);
  for (int i = 0; i < g.N; ++i) even(i, 0) = std::exp(-g.node(i) * g.node(i));
  even(0, 0) = even(g.N - 1, 0) = 0.0;
  const GridFunction qe(g, even, Extension::zero);
  CHECK(even_symmetrize(qe, V, params).values == qe.values);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd v(g.N, 1);
    for (int i = 0; i < g.N; ++i) {
      const double x = g.node(i);
      v(i, 0) = std::exp(-(x - 1.3) * (x - 1.3)) + 0.2 * nd(rng) * std::exp(-x * x / 9.0);
    }
    v(0, 0) = v(g.N - 1, 0) = 0.0;
    const GridFunction q(g, v, Extension::zero);
    const GridFunction out = even_symmetrize(q, V, params);
    CHECK(out.values == reflect(out).values);
    CHECK(energy_pinned(out, V, params).total <=
          energy_pinned(q, V, params).total + 1e-12);
  }
}

TEST_CASE("zero datum yields the zero minimizer immediately") {
  PinnedProblem prob = quadratic_problem(0.75, 4.0, 129, -1.0, 1.0, 0.0, 1.0);
  const auto [q, rep] = solve_pinned(prob);
  CHECK(q.sup_norm() == 0.0);
  CHECK(rep.energy == 0.0);
  CHECK(rep.residual_sup == 0.0);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
}

TEST_CASE("pinned minimizer for the quadratic well: even, decaying, below the initial energy") {
  PinnedProblem prob = quadratic_problem(0.75, 8.0, 257, -1.0, 1.0, 1.0, 1.0);
  PinnedSolveOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 4000;
  const auto [q, rep] = solve_pinned(prob, opts);

  CHECK(rep.converged);
  CHECK(rep.residual_sup <= 1e-6);
  CHECK(rep.energy < rep.initial_energy);
  CHECK(rep.sup_norm <= 1.0 + 1e-12);
  CHECK(rep.symmetrized);
  CHECK(rep.evenness_defect <= 1e-8);
  CHECK(rep.decay.value_right < 0.05);
  CHECK(rep.decay.value_left < 0.05);
  // profile equals the datum where pinned
  for (int i : prob.pin.index_set) CHECK(q.values(i, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // two-resolution self-consistency of the minimal energy
  PinnedProblem fine = quadratic_problem(0.75, 8.0, 513, -1.0, 1.0, 1.0, 1.0);
  const auto [q2, rep2] = solve_pinned(fine, opts);
  CHECK(rep2.converged);
  CHECK(std::abs(rep2.energy - rep.energy) <= 0.01 * std::abs(rep.energy));
}

TEST_CASE("degenerate pin point: allowed above s = 1/2, symmetric output, refused below") {
  PinnedProblem prob = quadratic_problem(0.75, 6.0, 193, 0.0, 0.0, 1.0, 1.0);
  REQUIRE(prob.pin.index_set.size() == 1);
  PinnedSolveOptions opts;
  opts.max_iter = 4000;
  const auto [q, rep] = solve_pinned(prob, opts);
  CHECK(rep.converged);
  CHECK(rep.evenness_defect == 0.0);
  CHECK(q.values((prob.grid.N - 1) / 2, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.sup_norm <= 1.0 + 1e-12);

  PinnedProblem bad = quadratic_problem(0.4, 6.0, 193, 0.0, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(solve_pinned(bad), std::invalid_argument);
}

TEST_CASE("solver input validation: datum shape, height, and the resonant exponent") {
  PinnedProblem prob = quadratic_problem(0.6, 6.0, 193, -1.0, 1.0, 1.0, 1.0);
  PinnedProblem wrong_rows = prob;
  wrong_rows.datum = Eigen::MatrixXd::Constant(3, 1, 0.5);
  CHECK_THROWS_AS(solve_pinned(wrong_rows), std::invalid_argument);

  PinnedProblem too_tall = prob;
  too_tall.datum.setConstant(1.5);
  CHECK_THROWS_AS(solve_pinned(too_tall), std::invalid_argument);

  PinnedProblem resonant = prob;
  resonant.alpha = 0.6;  // collides with s and no fallback target set
  CHECK_THROWS_AS(solve_pinned(resonant), std::invalid_argument);
  resonant.beta_bar = 0.3;
  CHECK(resonant.regularity_target() == doctest::Approx(0.3));
}

TEST_CASE("local minimality of the converged profile under compact perturbations") {
  PinnedProblem prob = quadratic_problem(0.75, 6.0, 129, -1.0, 1.0, 1.0, 1.0);
  PinnedSolveOptions opts;
  opts.max_iter = 4000;
  const auto [q, rep] = solve_pinned(prob, opts);
  REQUIRE(rep.converged);
  const double I0 = energy_pinned(q, prob.potential, prob.frac).total;

  std::vector<char> pinned(prob.grid.N, 0);
  for (int i : prob.pin.index_set) pinned[i] = 1;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd(0.0, 1.0);
  int violations = 0;
  for (int rep_i = 0; rep_i < 30; ++rep_i) {
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(prob.grid.N, 1);
    for (int i = 1; i + 1 < prob.grid.N; ++i)
      if (!pinned[i]) psi(i, 0) = nd(rng);
    for (double tau : {1e-3, -1e-3}) {
      GridFunction qt = q;
      qt.values += tau * psi;
      if (energy_pinned(qt, prob.potential, prob.frac).total < I0 - 1e-8) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("a sign-violating potential drives the energy through the floor") {
  PinnedProblem prob = quadratic_problem(0.25, 8.0, 65, -1.0, 1.0, 1.0, 5.0);
  PinnedPotential bad;
  bad.name = "inverted-well";
  bad.components = 1;
  bad.R = 5.0;
  bad.V = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
  bad.grad = [](const Eigen::VectorXd& v) { return Eigen::VectorXd(2.0 * v); };
  prob.potential = bad;
  PinnedSolveOptions opts;
  opts.K_cut = 0;  // no clamping, let the divergence show itself
  opts.energy_floor = -1e3;
  opts.max_iter = 500;
  CHECK_THROWS_AS(solve_pinned(prob, opts), std::runtime_error);
}

TEST_CASE("a clamp that raises the energy is reported as an internal fault") {
  // V grows toward q = 3, so truncating at R = 1 moves mass the wrong way
  PinnedProblem prob = quadratic_problem(0.25, 8.0, 65, -1.0, 1.0, 1.0, 1.0);
  PinnedPotential skew;
  skew.name = "off-center-well";
  skew.components = 1;
  skew.R = 1.0;
  skew.V = [](const Eigen::VectorXd& v) { return -(v(0) - 3.0) * (v(0) - 3.0); };
  skew.grad = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd g(1);
    g << -2.0 * (v(0) - 3.0);
    return g;
  };
  prob.potential = skew;
  PinnedSolveOptions opts;
  opts.K_cut = 5;
  opts.max_iter = 100;
  CHECK_THROWS_AS(solve_pinned(prob, opts), std::logic_error);
}

TEST_CASE("gradient flow collapses the bump and respects the maximum principle") {
  PotentialParams pp;
  const PinnedPotential V = builtin_library().make_pinned("quadratic-well", pp);
  FracParams params;
  params.s = 0.4;
  params.c_s = cs_constant(params.s);

  const NonexistenceReport rep = nonexistence_probe(V, params);
  CHECK(rep.initial_sup == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.final_sup <= 1e-6);
  CHECK(rep.checks >= 5);
  CHECK(rep.min_operator_at_max >= -1e-8);
  CHECK(rep.min_forcing_gap >= -1e-8);

  NonexistenceOptions zero;
  zero.amplitude = 0.0;
  zero.steps = 50;
  const NonexistenceReport zr = nonexistence_probe(V, params, zero);
  CHECK(zr.final_sup == 0.0);
  CHECK(zr.checks == 0);

  PinnedPotential wrong;
  wrong.components = 1;
  wrong.V = [](const Eigen::VectorXd& v) { return -std::pow(v.norm(), 4.0); };
  wrong.grad = [](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(-4.0 * std::pow(v.norm(), 2.0) * v);
  };
  CHECK_THROWS_AS(nonexistence_probe(wrong, params), std::invalid_argument);
}
