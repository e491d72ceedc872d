#include "fraclinic/potentials.hpp"

#include "fraclinic/frac_ops.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace fraclinic;

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(0.25) == doctest::Approx(4.0));
  CHECK(critical_exponent(0.4) == doctest::Approx(10.0));
  CHECK(std::isinf(critical_exponent(0.5)));
  CHECK(std::isinf(critical_exponent(0.75)));
  CHECK_THROWS_AS(critical_exponent(0.0), std::invalid_argument);
}

TEST_CASE("cutoff clamps and is idempotent") {
  Grid g(2.0, 33);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.N, 2);
  for (int i = 0; i < g.N; ++i) {
    v(i, 0) = 0.3 * std::sin(g.node(i));
    v(i, 1) = 2.0;
  }
  GridFunction q(g, v);
  CHECK_THROWS_AS(cutoff_TR(q, 0.0), std::invalid_argument);
  GridFunction below = cutoff_TR(q, 5.0);
  CHECK((below.values - v).cwiseAbs().maxCoeff() == 0.0);
  GridFunction at = cutoff_TR(q, 1.0);
  CHECK(at.values.col(1).maxCoeff() == 1.0);
  CHECK(at.values.col(1).minCoeff() == 1.0);
  GridFunction twice = cutoff_TR(at, 1.0);
  CHECK((twice.values - at.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(at.extension == q.extension);
  CHECK(at.grid == q.grid);
}

TEST_CASE("cutoff does not increase the seminorm") {
  std::mt19937 rng(99);
  std::normal_distribution<double> nd;
  Grid g(3.0, 101);
  for (double s : {0.25, 0.5, 0.75}) {
    CAPTURE(s);
    Eigen::MatrixXd v(g.N, 2);
    for (int i = 0; i < g.N; ++i)
      for (int c = 0; c < 2; ++c) v(i, c) = nd(rng);
    v.row(0).setZero();
    v.row(g.N - 1).setZero();
    GridFunction q(g, v);
    FracParams p(s);
    CHECK(gagliardo_sq(cutoff_TR(q, 0.8), p) <= gagliardo_sq(q, p) * (1.0 + 1e-12));
  }
}

TEST_CASE("quadratic well satisfies both pinning hypotheses") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.R = 1.5;
  par.components = 2;
  PinnedPotential P = cat.make_pinned("quadratic-well", par);
  HypothesisReport rep = check_pinned_hypotheses(P);
  CHECK(rep.pass);
  CHECK(rep.worst_margin <= 0.0);
  // clamping raises the well exactly, for every q
  std::mt19937 rng(5);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd q(2);
    q << nd(rng), nd(rng);
    Eigen::VectorXd c = q.cwiseMax(-P.R).cwiseMin(P.R);
    CHECK(P.V(c) >= P.V(q));
  }
}

TEST_CASE("perturbed cosine passes validation at its stated cutoff") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.eps = 0.1;
  par.delta = 0.1;
  par.R = 2.0 * M_PI;
  PinnedPotential P = cat.make_pinned("perturbed-cosine", par);
  Eigen::VectorXd zero(1), bump(1);
  zero << 0.0;
  CHECK(P.V(zero) == 0.0);
  bump << 2.0 * M_PI;  // cosine part vanishes, perturbation keeps it negative
  CHECK(P.V(bump) < 0.0);
  // gradient consistency by central differences
  for (double q0 : {-3.0, -0.7, 0.2, 4.0}) {
    Eigen::VectorXd q(1), qp(1), qm(1);
    q << q0;
    qp << q0 + 1e-6;
    qm << q0 - 1e-6;
    const double fd = (P.V(qp) - P.V(qm)) / 2e-6;
    CHECK(std::abs(fd - P.grad(q)[0]) < 1e-8);
  }
}

TEST_CASE("unknown names and bad parameters are rejected") {
  Catalog cat = builtin_library();
  PotentialParams par;
  CHECK_THROWS_AS(cat.make_pinned("no-such-well", par), std::invalid_argument);
  CHECK_THROWS_AS(cat.make_confined("no-such-w", par), std::invalid_argument);
  CHECK_THROWS_AS(cat.make_matrix("no-such-l", par), std::invalid_argument);
  PotentialParams bad;
  bad.p = 2.0;
  CHECK_THROWS_AS(cat.make_confined("power-w", bad), std::invalid_argument);
  PotentialParams vec;
  vec.components = 2;
  CHECK_THROWS_AS(cat.make_pinned("perturbed-cosine", vec), std::invalid_argument);
}

TEST_CASE("ambrosetti rabinowitz holds with equality for the homogeneous power") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.p = 3.0;
  ConfinedPotential P = cat.make_confined("power-w", par);
  ARReport rep = check_AR(P);
  CHECK(rep.pass);
  CHECK(std::abs(rep.worst_margin) < 1e-12);
  CHECK(rep.min_W > 0.0);
  // W = |q|^3/3 <= eps |q|^2 exactly up to |q| = 3 eps
  CHECK(rep.delta_eps1 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(rep.delta_eps01 == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("ar exponent at the quadratic border is rejected") {
  ConfinedPotential P;
  P.mu = 2.0;
  P.W = [](double, const Eigen::VectorXd& q) { return q.squaredNorm(); };
  P.grad = [](double, const Eigen::VectorXd& q) { return Eigen::VectorXd(2.0 * q); };
  CHECK_THROWS_AS(check_AR(P), std::invalid_argument);
}

TEST_CASE("weighted power potential passes and keeps a spatial profile") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.mu = 3.0;
  ConfinedPotential P = cat.make_confined("weighted-power-w", par);
  ARReport rep = check_AR(P);
  CHECK(rep.pass);
  CHECK(omega1(P, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(omega1(P, M_PI / 2.0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(omega1(P, -M_PI / 2.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unit sphere infimum for the plain power") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.p = 3.0;
  ConfinedPotential P = cat.make_confined("power-w", par);
  CHECK(omega1(P, 0.7) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  par.components = 2;
  ConfinedPotential P2 = cat.make_confined("power-w", par);
  CHECK(omega1(P2, -1.3) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("superquadratic lower bound beyond the unit sphere") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.mu = 3.0;
  ConfinedPotential P = cat.make_confined("weighted-power-w", par);
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> ux(-12.0, 12.0), ur(1.0, 5.0), us(-1.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = ux(rng);
    Eigen::VectorXd q(1);
    q << ur(rng) * (us(rng) > 0 ? 1.0 : -1.0);
    const double lhs = P.W(x, q);
    const double rhs = omega1(P, x) * std::pow(std::abs(q[0]), P.mu);
    if (lhs < rhs * (1.0 - 1e-12)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("nonpositive sphere infimum is an error") {
  ConfinedPotential P;
  P.W = [](double, const Eigen::VectorXd&) { return -1.0; };
  P.grad = [](double, const Eigen::VectorXd& q) { return Eigen::VectorXd::Zero(q.size()).eval(); };
  CHECK_THROWS_AS(omega1(P, 0.0), std::runtime_error);
}

TEST_CASE("growth bounds recover the closed form for the plain power") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.p = 3.0;
  ConfinedPotential P = cat.make_confined("power-w", par);
  GrowthBounds g = growth_bounds(P, 0.5);
  // |grad W| = |q|^2 <= |q| exactly up to 1, and <= eps |q| up to eps
  CHECK(g.r0 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g.r_eps == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(g.a1 == 1.0);
  CHECK(g.a2 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.sigma == doctest::Approx(1.0 / (0.5 * 0.5) + 2.0).epsilon(1e-5));
  CHECK(g.worst_split_margin >= 0.0);
  CHECK_THROWS_AS(growth_bounds(P, 0.0), std::invalid_argument);
}

TEST_CASE("perturbed pendulum potential satisfies the split bound") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.eps = 1.0;
  par.p = 3.0;
  ConfinedPotential P = cat.make_confined("pn-perturbed", par);
  CHECK(P.mu > 2.0);
  GrowthBounds g = growth_bounds(P, 0.25);
  CHECK(g.worst_split_margin >= 0.0);
  CHECK(g.r0 > 0.0);
  // parameter window: p must stay below 2 + 2 eps
  PotentialParams wide;
  wide.eps = 0.1;
  wide.p = 3.0;
  CHECK_THROWS_AS(cat.make_confined("pn-perturbed", wide), std::invalid_argument);
}

TEST_CASE("quadratic remainder constant for the homogeneous power") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.p = 3.0;
  ConfinedPotential P = cat.make_confined("power-w", par);
  // (1/2) grad W . q - W = |q|^3 / 6, so the ratio to |q|^2 peaks at M / 6
  const double kappa = kappa_M_estimate(P, 3.0);
  CHECK(kappa > 0.48);
  CHECK(kappa <= 0.5 + 1e-9);
  CHECK_THROWS_AS(kappa_M_estimate(P, 0.0), std::invalid_argument);
}

TEST_CASE("confinement matrices validate and keep their diagonal tail") {
  Catalog cat = builtin_library();
  PotentialParams par;
  par.eps = 1.0;
  par.shift = 2.0;
  ConfinementMatrix M = cat.make_matrix("harmonic", par);
  CHECK(M.alpha_L == 2.0);
  CHECK(M.nonneg_entries);
  HypothesisReport rep = check_matrix_hypotheses(M);
  CHECK(rep.pass);
  CHECK(rep.worst_margin >= -1e-10);
  CHECK(M.L(3.0)(0, 0) == doctest::Approx(2.0 + 9.0));

  par.components = 2;
  ConfinementMatrix D2 = cat.make_matrix("diagonal-shifted", par);
  CHECK(check_matrix_hypotheses(D2).pass);
  Eigen::MatrixXd L = D2.L(5.0);
  CHECK(L(0, 1) == 0.0);
  CHECK(L(1, 0) == 0.0);
  CHECK(L(1, 1) > L(0, 0));
  CHECK(D2.d_j[1](5.0) == doctest::Approx(L(1, 1)));
}

TEST_CASE("broken matrices are caught by the sampler") {
  ConfinementMatrix bad;
  bad.components = 2;
  bad.alpha_L = 1.0;
  bad.L = [](double x) {
    Eigen::MatrixXd L(2, 2);
    L << 1.0 + x * x, 0.5, -0.5, 1.0 + x * x;  // not symmetric
    return L;
  };
  CHECK_FALSE(check_matrix_hypotheses(bad).pass);

  ConfinementMatrix flat;
  flat.components = 1;
  flat.alpha_L = 1.0;
  flat.L = [](double) { return Eigen::MatrixXd::Identity(1, 1).eval(); };  // no blow-up
  CHECK_FALSE(check_matrix_hypotheses(flat).pass);
}
