#pragma once

// Limited-memory quasi-Newton descent with backtracking line search, shared
// by the pinned minimizer and the saddle refinement. The caller works on a
// flat coordinate vector; an optional projection hook runs every few
// iterations (the cutoff step of the constrained program) and is required
// not to raise the objective, which the loop checks and treats as an
// internal fault if violated.

#include <Eigen/Core>

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>

namespace fraclinic::detail {

struct LbfgsOptions {
  int max_iter = 2000;
  double grad_tol = 1e-8;  // sup norm of the flat gradient
  int memory = 10;
  int hook_every = 0;  // 0 disables the projection hook
  std::function<void(Eigen::VectorXd&)> hook;
  double hook_slack = 1e-10;  // relative tolerance for the no-increase check
  double f_floor = -1e12;     // abort threshold: objective diverging below
  double c1 = 1e-4;
  int max_backtracks = 50;
};

struct LbfgsResult {
  double f = 0.0;
  double grad_sup = 0.0;
  int iterations = 0;
  bool converged = false;
  bool floor_hit = false;
  bool stalled = false;  // line search could not make progress
};

// fg(x, g) fills g and returns the objective. x is updated in place.
template <typename FG>
LbfgsResult lbfgs_minimize(FG&& fg, Eigen::VectorXd& x, const LbfgsOptions& opt) {
  const int n = static_cast<int>(x.size());
  LbfgsResult res;
  Eigen::VectorXd g(n), g_new(n), d(n), xt(n);
  double f = fg(x, g);
  if (!std::isfinite(f)) throw std::invalid_argument("lbfgs_minimize: objective not finite at start");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    res.grad_sup = g.lpNorm<Eigen::Infinity>();
    res.f = f;
    if (res.grad_sup <= opt.grad_tol) {
      res.converged = true;
      return res;
    }
    if (f < opt.f_floor) {
      res.floor_hit = true;
      return res;
    }

    // two-loop recursion for the quasi-Newton direction
    d = -g;
    const int m = static_cast<int>(s_hist.size());
    if (m > 0) {
      Eigen::VectorXd alpha(m);
      for (int i = m - 1; i >= 0; --i) {
        alpha[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= alpha[i] * y_hist[i];
      }
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      d *= gamma;
      for (int i = 0; i < m; ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(d);
        d += (alpha[i] - beta) * s_hist[i];
      }
    }
    double gd = g.dot(d);
    if (!(gd < 0.0)) {  // not a descent direction, fall back to steepest
      d = -g;
      gd = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double alpha = (m == 0) ? 1.0 / std::max(1.0, res.grad_sup) : 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      xt = x + alpha * d;
      f_new = fg(xt, g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.c1 * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.stalled = true;
      res.f = f;
      return res;
    }

    Eigen::VectorXd sv = xt - x;
    Eigen::VectorXd yv = g_new - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      s_hist.push_back(std::move(sv));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = xt;
    f = f_new;
    g = g_new;

    if (opt.hook_every > 0 && opt.hook && (it + 1) % opt.hook_every == 0) {
      const double f_before = f;
      opt.hook(x);
      f = fg(x, g);
      if (f > f_before + opt.hook_slack * (1.0 + std::abs(f_before)))
        throw std::logic_error("lbfgs_minimize: projection hook increased the objective");
      s_hist.clear();  // curvature pairs straddling a projection are stale
      y_hist.clear();
      rho_hist.clear();
    }
  }
  res.iterations = opt.max_iter;
  res.f = f;
  res.grad_sup = g.lpNorm<Eigen::Infinity>();
  res.converged = res.grad_sup <= opt.grad_tol;
  return res;
}

}  // namespace fraclinic::detail
