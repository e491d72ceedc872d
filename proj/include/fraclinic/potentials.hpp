#pragma once

// Potential families for the two variational programs and samplers for every
// structural hypothesis they must satisfy.
//
// Pinned program: a spatially homogeneous V with V(0) = 0, strictly negative
// away from 0, improved (not worsened) by clamping beyond its level R.
//
// Confined program: W(x, q) superquadratic in q (Ambrosetti-Rabinowitz with
// exponent mu > 2), with polynomial gradient growth (a0, p), paired with a
// symmetric confinement matrix L(x) that is coercive and blows up in x.
//
// Evaluators are black boxes supplied as std::function, so hypotheses are
// checked on structured plus random samples and the reports carry worst-case
// margins rather than proofs.

#include "fraclinic/grid.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclinic {

// Largest admissible growth exponent: 2/(1-2s) below the half, unconstrained
// from s = 1/2 on.
inline double critical_exponent(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("critical_exponent: need s in (0,1)");
  return s < 0.5 ? 2.0 / (1.0 - 2.0 * s) : kInfinity;
}

struct PinnedPotential {
  std::function<double(const Eigen::VectorXd&)> V;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  double R = 1.0;             // cutoff level
  double holder_gamma = 0.0;  // gradient Holder exponent, 0 when unspecified
  int components = 1;
  std::string name = "custom";
};

struct ConfinedPotential {
  std::function<double(double, const Eigen::VectorXd&)> W;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> grad;
  double mu = 3.0;  // Ambrosetti-Rabinowitz exponent, > 2
  double p = 3.0;   // gradient growth exponent, in (2, critical_exponent(s))
  double a0 = 1.0;  // gradient growth constant
  int components = 1;
  std::string name = "custom";
  // quadratic-remainder constants |(1/2) grad W . q - W| <= kappa_M |q|^2 on
  // |q| <= M, estimated on demand and cached by level
  std::map<double, double> kappa_M;
};

struct ConfinementMatrix {
  std::function<Eigen::MatrixXd(double)> L;
  double alpha_L = 1.0;        // coercivity: L(x) q . q >= alpha_L |q|^2
  bool nonneg_entries = false;  // every entry of L(x) is >= 0
  double D = 0.0;               // beyond |x| >= D the matrix is diagonal; 0 = no data
  std::vector<std::function<double(double)>> d_j;  // diagonal entries for |x| >= D
  int components = 1;
  std::string name = "custom";
};

// ---------------------------------------------------------------------------
// cutoff operator

// Componentwise clamp to [-R, R]. Clamping is 1-Lipschitz in each entry, so
// with the nonnegative pair weights the discrete seminorm cannot increase;
// the tail models follow the clamped boundary rows automatically.
inline GridFunction cutoff_TR(const GridFunction& q, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("cutoff_TR: need R > 0");
  GridFunction out = q;
  out.values = q.values.cwiseMax(-R).cwiseMin(R);
  return out;
}

// ---------------------------------------------------------------------------
// sampling helpers

namespace detail {

inline Eigen::VectorXd unit_direction(std::mt19937& rng, int n) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  double norm2 = 0.0;
  do {
    for (int j = 0; j < n; ++j) v[j] = nd(rng);
    norm2 = v.squaredNorm();
  } while (norm2 < 1e-12);
  return v / std::sqrt(norm2);
}

// log-uniform radius in [lo, hi]
inline double log_uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline std::vector<double> x_net(std::mt19937& rng, int random_count) {
  std::vector<double> xs;
  for (int k = -20; k <= 20; ++k) xs.push_back(0.5 * k);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < random_count; ++k) xs.push_back(u(rng));
  return xs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// hypothesis reports

struct HypothesisReport {
  bool pass = true;
  double worst_margin = 0.0;  // sign convention noted per check
  unsigned seed = 0;
  int samples = 0;
  std::string detail;
};

// V(0) = 0, V < 0 away from 0, and clamping beyond R never lowers V.
inline HypothesisReport check_pinned_hypotheses(const PinnedPotential& P, unsigned seed = 101,
                                                int count = 400) {
  HypothesisReport r;
  r.seed = seed;
  std::mt19937 rng(seed);
  const int n = P.components;
  const double v0 = P.V(Eigen::VectorXd::Zero(n));
  if (std::abs(v0) > 1e-12) {
    r.pass = false;
    r.detail = "V(0) != 0";
    return r;
  }
  double worst_v1 = -kInfinity;  // max V(q) over q != 0, must stay < 0
  double worst_v2 = -kInfinity;  // max V(q) - V(T_R q) outside the box, must stay <= 0
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd dir = detail::unit_direction(rng, n);
    Eigen::VectorXd q = detail::log_uniform(rng, 1e-3, 4.0 * P.R) * dir;
    worst_v1 = std::max(worst_v1, P.V(q));
    Eigen::VectorXd far = (P.R + detail::log_uniform(rng, 1e-2, 10.0 * P.R)) * dir;
    Eigen::VectorXd clamped = far.cwiseMax(-P.R).cwiseMin(P.R);
    worst_v2 = std::max(worst_v2, P.V(far) - P.V(clamped));
    ++r.samples;
  }
  r.worst_margin = std::max(worst_v1, worst_v2);
  if (worst_v1 >= 0.0 || worst_v2 > 1e-12) {
    r.pass = false;
    r.detail = worst_v1 >= 0.0 ? "V not negative away from 0" : "clamping lowered V";
  }
  return r;
}

struct ARReport {
  bool pass = true;
  double worst_margin = 0.0;  // min over samples of grad W . q - mu W, want >= ~0
  double min_W = 0.0;         // min over samples of W, want > 0
  double delta_eps1 = 0.0;    // largest delta with W <= 1.0 |q|^2 on |q| <= delta
  double delta_eps01 = 0.0;   // same for eps = 0.1
  unsigned seed = 0;
  int samples = 0;
};

namespace detail {

// largest shell radius on which W(x, q) <= eps |q|^2 holds for all sampled
// (x, direction, sub-radius); bisection from a bracket found by doubling
template <typename WFn>
double near_origin_delta(const WFn& W, int n, double eps, std::mt19937& rng) {
  auto admissible = [&](double delta) {
    std::mt19937 local(12345);  // frozen so bisection is monotone in delta
    for (double x : {-7.3, -1.0, 0.0, 0.4, 2.0, 11.0}) {
      for (int d = 0; d < 8; ++d) {
        Eigen::VectorXd dir = unit_direction(local, n);
        for (int k = 1; k <= 16; ++k) {
          const double rad = delta * k / 16.0;
          const Eigen::VectorXd q = rad * dir;
          if (W(x, q) > eps * rad * rad) return false;
        }
      }
    }
    return true;
  };
  (void)rng;
  double lo = 1e-8;
  if (!admissible(lo)) return 0.0;
  double hi = lo;
  while (hi < 64.0 && admissible(2.0 * hi)) hi *= 2.0;
  if (hi >= 64.0) return hi;
  double bad = 2.0 * hi;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (hi + bad);
    (admissible(mid) ? hi : bad) = mid;
  }
  return hi;
}

}  // namespace detail

// Ambrosetti-Rabinowitz: 0 < mu W(x,q) <= grad W(x,q) . q for q != 0, plus an
// empirical near-origin quadratic bound W <= eps |q|^2 on |q| <= delta(eps).
inline ARReport check_AR(const ConfinedPotential& P, unsigned seed = 202, int count = 1000) {
  if (!(P.mu > 2.0)) throw std::invalid_argument("check_AR: AR exponent must exceed 2");
  ARReport r;
  r.seed = seed;
  std::mt19937 rng(seed);
  const int n = P.components;
  r.worst_margin = kInfinity;
  r.min_W = kInfinity;
  std::uniform_real_distribution<double> ux(-15.0, 15.0);
  for (int k = 0; k < count; ++k) {
    const double x = ux(rng);
    Eigen::VectorXd q = detail::log_uniform(rng, 1e-2, 20.0) * detail::unit_direction(rng, n);
    const double w = P.W(x, q);
    const double dq = P.grad(x, q).dot(q);
    r.min_W = std::min(r.min_W, w);
    // relative margin so large radii do not dominate
    r.worst_margin = std::min(r.worst_margin, (dq - P.mu * w) / std::max(1.0, std::abs(dq)));
    ++r.samples;
  }
  r.delta_eps1 = detail::near_origin_delta(P.W, n, 1.0, rng);
  r.delta_eps01 = detail::near_origin_delta(P.W, n, 0.1, rng);
  if (r.min_W <= 0.0 || r.worst_margin < -1e-12 || r.delta_eps1 <= 0.0 || r.delta_eps01 <= 0.0)
    r.pass = false;
  return r;
}

// omega_1(x): infimum of W(x, .) over the unit sphere, by an angular net.
inline double omega1(const ConfinedPotential& P, double x) {
  const int n = P.components;
  double best = kInfinity;
  if (n == 1) {
    Eigen::VectorXd q(1);
    q[0] = 1.0;
    best = P.W(x, q);
    q[0] = -1.0;
    best = std::min(best, P.W(x, q));
  } else if (n == 2) {
    Eigen::VectorXd q(2);
    for (int k = 0; k < 512; ++k) {
      const double th = 2.0 * M_PI * k / 512;
      q << std::cos(th), std::sin(th);
      best = std::min(best, P.W(x, q));
    }
  } else if (n == 3) {
    Eigen::VectorXd q(3);
    for (int a = 0; a < 96; ++a)
      for (int b = 0; b < 96; ++b) {
        const double th = M_PI * (a + 0.5) / 96, ph = 2.0 * M_PI * b / 96;
        q << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
        best = std::min(best, P.W(x, q));
      }
  } else {
    // fall back to a random net in higher dimension
    std::mt19937 rng(4049);
    for (int k = 0; k < 20000; ++k) best = std::min(best, P.W(x, detail::unit_direction(rng, n)));
  }
  if (!(best > 0.0))
    throw std::runtime_error("omega1: nonpositive infimum on the unit sphere (AR fails)");
  return best;
}

struct GrowthBounds {
  double sigma = 0.0;  // |grad W| <= eps |q| + sigma |q|^(p-1) on samples
  double r0 = 0.0;     // largest radius with |grad W| <= |q|
  double a1 = 1.0;
  double a2 = 0.0;     // a0 (r0^(2-p) + 1)
  double r_eps = 0.0;  // largest radius with |grad W| <= eps |q|
  double worst_split_margin = 0.0;  // min of eps|q| + sigma|q|^(p-1) - |grad W|
  unsigned seed = 0;
};

// The gradient splitting used by the mountain-pass geometry: little-o at the
// origin gives |grad W| <= eps|q| below some r_eps, polynomial growth takes
// over above, and sigma(eps) merges the two into one global bound.
inline GrowthBounds growth_bounds(const ConfinedPotential& P, double eps, unsigned seed = 303) {
  if (!(eps > 0.0)) throw std::invalid_argument("growth_bounds: need eps > 0");
  GrowthBounds g;
  g.seed = seed;
  std::mt19937 rng(seed);
  const int n = P.components;
  auto sup_ratio_below = [&](double radius, double bound_slope) {
    // is |grad W(x, q)| <= bound_slope |q| for all sampled |q| <= radius?
    std::mt19937 local(777);
    for (double x : detail::x_net(local, 8)) {
      for (int d = 0; d < 6; ++d) {
        Eigen::VectorXd dir = detail::unit_direction(local, n);
        for (int k = 1; k <= 12; ++k) {
          const double rad = radius * k / 12.0;
          if (P.grad(x, rad * dir).norm() > bound_slope * rad) return false;
        }
      }
    }
    return true;
  };
  auto largest_radius = [&](double slope) {
    double lo = 1e-8;
    if (!sup_ratio_below(lo, slope)) return 0.0;
    double hi = lo;
    while (hi < 64.0 && sup_ratio_below(2.0 * hi, slope)) hi *= 2.0;
    if (hi >= 64.0) return hi;
    double bad = 2.0 * hi;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (hi + bad);
      (sup_ratio_below(mid, slope) ? hi : bad) = mid;
    }
    return hi;
  };
  g.r0 = largest_radius(1.0);
  g.r_eps = largest_radius(eps);
  if (g.r0 <= 1e-7 || g.r_eps <= 1e-7)
    throw std::runtime_error("growth_bounds: gradient is not little-o of |q| at the origin");
  g.a1 = 1.0;
  g.a2 = P.a0 * (std::pow(g.r0, 2.0 - P.p) + 1.0);
  // above r_eps:  |grad W| <= a1 + a2 |q|^(p-1) <= (a1 r_eps^(1-p) + a2) |q|^(p-1)
  g.sigma = g.a1 * std::pow(g.r_eps, 1.0 - P.p) + g.a2;
  // verify the merged bound on independent samples
  g.worst_split_margin = kInfinity;
  std::uniform_real_distribution<double> ux(-15.0, 15.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = ux(rng);
    const double rad = detail::log_uniform(rng, 1e-3, 30.0);
    Eigen::VectorXd q = rad * detail::unit_direction(rng, n);
    const double bound = eps * rad + g.sigma * std::pow(rad, P.p - 1.0);
    g.worst_split_margin =
        std::min(g.worst_split_margin, (bound - P.grad(x, q).norm()) / std::max(1.0, bound));
  }
  if (g.worst_split_margin < -1e-10)
    throw std::runtime_error("growth_bounds: merged gradient bound failed on samples");
  return g;
}

// Quadratic remainder |(1/2) grad W . q - W| <= kappa |q|^2 on |q| <= M: the
// estimated constant is the sampled supremum of the ratio (recorded as an
// estimate, not claimed optimal).
inline double kappa_M_estimate(const ConfinedPotential& P, double M, unsigned seed = 404) {
  if (!(M > 0.0)) throw std::invalid_argument("kappa_M_estimate: need M > 0");
  std::mt19937 rng(seed);
  const int n = P.components;
  double kappa = 0.0;
  std::uniform_real_distribution<double> ux(-15.0, 15.0);
  for (int k = 0; k < 4000; ++k) {
    const double x = ux(rng);
    const double rad = detail::log_uniform(rng, 1e-4 * M, M);
    Eigen::VectorXd q = rad * detail::unit_direction(rng, n);
    const double rem = std::abs(0.5 * P.grad(x, q).dot(q) - P.W(x, q));
    kappa = std::max(kappa, rem / (rad * rad));
  }
  return kappa;
}

// Symmetry, coercivity, blow-up along |x|, and the declared diagonal tail.
inline HypothesisReport check_matrix_hypotheses(const ConfinementMatrix& Lm, unsigned seed = 505,
                                                int count = 300) {
  HypothesisReport r;
  r.seed = seed;
  std::mt19937 rng(seed);
  const int n = Lm.components;
  std::uniform_real_distribution<double> ux(-30.0, 30.0);
  double worst = kInfinity;  // min eigenvalue margin over alpha_L
  for (int k = 0; k < count; ++k) {
    const double x = ux(rng);
    Eigen::MatrixXd L = Lm.L(x);
    if (L.rows() != n || L.cols() != n) {
      r.pass = false;
      r.detail = "matrix size mismatch";
      return r;
    }
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      r.pass = false;
      r.detail = "matrix not symmetric";
      return r;
    }
    if (Lm.nonneg_entries && L.minCoeff() < 0.0) {
      r.pass = false;
      r.detail = "negative entry under nonneg flag";
      return r;
    }
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues().minCoeff();
    worst = std::min(worst, lmin - Lm.alpha_L);
    ++r.samples;
  }
  r.worst_margin = worst;
  if (worst < -1e-10) {
    r.pass = false;
    r.detail = "coercivity below alpha_L";
    return r;
  }
  // blow-up: smallest eigenvalue along a doubling radius ladder must grow
  // without bound and monotonically past D
  auto beta = [&](double x) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Lm.L(x)).eigenvalues().minCoeff();
  };
  const double base = std::max(1.0, Lm.D);
  double prev = -kInfinity;
  for (double x = base; x <= 1024.0 * base; x *= 2.0) {
    const double b = std::min(beta(x), beta(-x));
    if (b < prev - 1e-12) {
      r.pass = false;
      r.detail = "eigenvalue ladder not monotone";
      return r;
    }
    prev = b;
  }
  if (prev < 100.0 * std::max(1.0, Lm.alpha_L)) {
    r.pass = false;
    r.detail = "eigenvalues do not blow up along |x|";
    return r;
  }
  if (Lm.D > 0.0) {
    if (static_cast<int>(Lm.d_j.size()) != n) {
      r.pass = false;
      r.detail = "diagonal tail data has wrong arity";
      return r;
    }
    for (double x : {Lm.D, 2.0 * Lm.D, -3.0 * Lm.D, 10.0 * Lm.D}) {
      Eigen::MatrixXd L = Lm.L(x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i != j && L(i, j) != 0.0) {
            r.pass = false;
            r.detail = "off-diagonal entry beyond D";
            return r;
          }
          if (i == j && std::abs(L(i, i) - Lm.d_j[i](x)) > 1e-12) {
            r.pass = false;
            r.detail = "diagonal tail functions disagree with L";
            return r;
          }
        }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// builtin catalog

struct PotentialParams {
  double R = 2.0 * M_PI;
  double eps = 0.1;
  double delta = 0.1;
  double scale = 1.0;
  double p = 3.0;
  double mu = 3.0;
  double a0 = 1.0;
  double shift = 1.0;
  int components = 1;
};

struct Catalog {
  std::vector<std::string> pinned_names{"quadratic-well", "perturbed-cosine"};
  std::vector<std::string> confined_names{"power-w", "weighted-power-w", "pn-perturbed"};
  std::vector<std::string> matrix_names{"harmonic", "diagonal-shifted"};

  PinnedPotential make_pinned(const std::string& name, const PotentialParams& par) const;
  ConfinedPotential make_confined(const std::string& name, const PotentialParams& par) const;
  ConfinementMatrix make_matrix(const std::string& name, const PotentialParams& par) const;
};

inline PinnedPotential Catalog::make_pinned(const std::string& name,
                                            const PotentialParams& par) const {
  PinnedPotential P;
  P.name = name;
  P.components = par.components;
  P.R = par.R;
  if (name == "quadratic-well") {
    const double c = par.scale;
    if (!(c > 0.0)) throw std::invalid_argument("quadratic-well: scale must be positive");
    P.V = [c](const Eigen::VectorXd& q) { return -c * q.squaredNorm(); };
    P.grad = [c](const Eigen::VectorXd& q) { return Eigen::VectorXd(-2.0 * c * q); };
    P.holder_gamma = 1.0;  // gradient is Lipschitz
  } else if (name == "perturbed-cosine") {
    if (par.components != 1)
      throw std::invalid_argument("perturbed-cosine: scalar potential only");
    const double e = par.eps, d = par.delta;
    if (!(e > 0.0 && d > 0.0))
      throw std::invalid_argument("perturbed-cosine: eps and delta must be positive");
    P.V = [e, d](const Eigen::VectorXd& q) {
      return std::cos(q[0]) - 1.0 + e * (std::exp(-d * q[0] * q[0]) - 1.0);
    };
    P.grad = [e, d](const Eigen::VectorXd& q) {
      Eigen::VectorXd g(1);
      g[0] = -std::sin(q[0]) - 2.0 * e * d * q[0] * std::exp(-d * q[0] * q[0]);
      return g;
    };
    P.holder_gamma = 1.0;
  } else {
    throw std::invalid_argument("unknown pinned potential: " + name);
  }
  HypothesisReport rep = check_pinned_hypotheses(P);
  if (!rep.pass)
    throw std::runtime_error("pinned potential '" + name + "' failed validation: " + rep.detail);
  return P;
}

inline ConfinedPotential Catalog::make_confined(const std::string& name,
                                                const PotentialParams& par) const {
  ConfinedPotential P;
  P.name = name;
  P.components = par.components;
  if (name == "power-w") {
    const double p = par.p;
    if (!(p > 2.0)) throw std::invalid_argument("power-w: exponent must exceed 2");
    P.mu = p;  // homogeneous, AR holds with equality
    P.p = p;
    P.a0 = 1.0;
    P.W = [p](double, const Eigen::VectorXd& q) { return std::pow(q.norm(), p) / p; };
    P.grad = [p](double, const Eigen::VectorXd& q) {
      const double r = q.norm();
      return Eigen::VectorXd(r > 0 ? (std::pow(r, p - 2.0) * q).eval()
                                   : Eigen::VectorXd::Zero(q.size()).eval());
    };
  } else if (name == "weighted-power-w") {
    const double mu = par.mu;
    if (!(mu > 2.0)) throw std::invalid_argument("weighted-power-w: exponent must exceed 2");
    P.mu = mu;
    P.p = mu;
    P.a0 = 3.0 * mu;  // weight 2 + sin x is at most 3
    P.W = [mu](double x, const Eigen::VectorXd& q) {
      return (2.0 + std::sin(x)) * std::pow(q.norm(), mu);
    };
    P.grad = [mu](double x, const Eigen::VectorXd& q) {
      const double r = q.norm();
      return Eigen::VectorXd(r > 0
                                 ? ((2.0 + std::sin(x)) * mu * std::pow(r, mu - 2.0) * q).eval()
                                 : Eigen::VectorXd::Zero(q.size()).eval());
    };
  } else if (name == "pn-perturbed") {
    if (par.components != 1) throw std::invalid_argument("pn-perturbed: scalar potential only");
    const double e = par.eps, p = par.p;
    if (!(e > 0.0)) throw std::invalid_argument("pn-perturbed: eps must be positive");
    if (!(p > 2.0 && p < 2.0 + 2.0 * e))
      throw std::invalid_argument("pn-perturbed: need p in (2, 2 + 2 eps)");
    P.mu = 2.2;  // conservative AR exponent for the default eps = 1, p = 3
    P.p = p;
    P.a0 = 4.0;
    P.W = [e, p](double, const Eigen::VectorXd& q) {
      return -std::pow(1.0 - std::cos(q[0]), 1.0 + e) + e * std::pow(std::abs(q[0]), p);
    };
    P.grad = [e, p](double, const Eigen::VectorXd& q) {
      Eigen::VectorXd g(1);
      const double u = q[0];
      g[0] = -(1.0 + e) * std::pow(1.0 - std::cos(u), e) * std::sin(u) +
             e * p * std::pow(std::abs(u), p - 2.0) * u;
      return g;
    };
  } else {
    throw std::invalid_argument("unknown confined potential: " + name);
  }
  ARReport rep = check_AR(P);
  if (!rep.pass)
    throw std::runtime_error("confined potential '" + name + "' failed the AR validation");
  return P;
}

inline ConfinementMatrix Catalog::make_matrix(const std::string& name,
                                              const PotentialParams& par) const {
  ConfinementMatrix M;
  M.name = name;
  M.components = par.components;
  const int n = par.components;
  const double e = par.eps, shift = par.shift;
  if (!(e > 0.0 && shift > 0.0))
    throw std::invalid_argument("confinement matrix: eps and shift must be positive");
  if (name == "harmonic") {
    M.L = [e, shift, n](double x) {
      return Eigen::MatrixXd((shift + e * x * x) * Eigen::MatrixXd::Identity(n, n));
    };
    M.alpha_L = shift;
    M.nonneg_entries = true;
    M.D = 1.0;
    for (int j = 0; j < n; ++j)
      M.d_j.push_back([e, shift](double x) { return shift + e * x * x; });
  } else if (name == "diagonal-shifted") {
    // distinct growth per component, still diagonal beyond D
    M.L = [e, shift, n](double x) {
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
      for (int j = 0; j < n; ++j) L(j, j) = shift + e * x * x * (1.0 + 0.5 * j);
      return L;
    };
    M.alpha_L = shift;
    M.nonneg_entries = true;
    M.D = 1.0;
    for (int j = 0; j < n; ++j)
      M.d_j.push_back([e, shift, j](double x) { return shift + e * x * x * (1.0 + 0.5 * j); });
  } else {
    throw std::invalid_argument("unknown confinement matrix: " + name);
  }
  HypothesisReport rep = check_matrix_hypotheses(M);
  if (!rep.pass)
    throw std::runtime_error("confinement matrix '" + name + "' failed validation: " + rep.detail);
  return M;
}

inline Catalog builtin_library() { return Catalog{}; }

}  // namespace fraclinic
