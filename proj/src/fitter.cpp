#include "luq/fitter.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace luq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kC1 = 1e-4;  // sufficient decrease
constexpr double kC2 = 0.9;   // curvature

// Internals minimize phi = -f.
struct LinePoint {
  double alpha, value, deriv;
};

class LineSearchFn {
 public:
  LineSearchFn(const ObjectiveFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& d)
      : f_(f), x_(x), d_(d), g_(x.size()) {}

  LinePoint eval(double alpha) {
    xt_ = x_ + alpha * d_;
    const double v = f_(xt_, &g_);
    ++evals_;
    return {alpha, -v, -g_.dot(d_)};
  }

  const Eigen::VectorXd& last_x() const { return xt_; }
  const Eigen::VectorXd& last_grad() const { return g_; }  // gradient of f
  int evals() const { return evals_; }

 private:
  const ObjectiveFn& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& d_;
  Eigen::VectorXd g_, xt_;
  int evals_ = 0;
};

// Strong-Wolfe line search (bracket + zoom). Returns true on success with
// `out` holding an accepted point; on failure `out` holds the best point
// with a plain decrease if one was found (alpha 0 otherwise).
bool wolfe_line_search(LineSearchFn& fn, const LinePoint& p0, LinePoint& out) {
  const double f0 = p0.value;
  const double d0 = p0.deriv;  // must be negative (descent for phi)
  if (!(d0 < 0.0)) return false;

  // Near the optimum the available decrease falls below the rounding noise
  // of the objective; accept curvature-satisfying points whose value is
  // within that noise (approximate Wolfe).
  const double eps_f = 1e-12 * (1.0 + std::abs(f0));
  auto wolfe_ok = [&](const LinePoint& p) {
    if (!(std::abs(p.deriv) <= -kC2 * d0)) return false;
    return p.value <= f0 + kC1 * p.alpha * d0 || p.value <= f0 + eps_f;
  };
  auto quad_step = [](const LinePoint& lo, const LinePoint& hi) {
    // minimizer of the quadratic through (lo.value, lo.deriv) and hi.value
    const double dalpha = hi.alpha - lo.alpha;
    const double denom = 2.0 * (hi.value - lo.value - lo.deriv * dalpha);
    if (denom == 0.0) return lo.alpha + 0.5 * dalpha;
    return lo.alpha - lo.deriv * dalpha * dalpha / denom;
  };

  LinePoint best{0.0, f0, d0};
  bool have_decrease = false;

  // zoom keeps the invariant: lo satisfies sufficient decrease, interval
  // brackets a Wolfe point
  auto zoom = [&](LinePoint lo, LinePoint hi) -> bool {
    for (int it = 0; it < 40; ++it) {
      double a = quad_step(lo, hi);
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double width = right - left;
      if (!(a > left + 0.1 * width && a < right - 0.1 * width)) a = 0.5 * (left + right);
      LinePoint p = fn.eval(a);
      if (std::isfinite(p.value) && p.value < best.value) {
        best = p;
        have_decrease = p.value < f0;
      }
      if (wolfe_ok(p)) {
        out = p;
        return true;
      }
      if (!std::isfinite(p.value) || p.value > f0 + kC1 * a * d0 || p.value >= lo.value) {
        hi = p;
      } else {
        if (p.deriv * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = p;
      }
      if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
    }
    // interval collapsed: settle for sufficient decrease at lo
    if (lo.alpha > 0.0 && lo.value <= f0 + kC1 * lo.alpha * d0) {
      out = lo;
      return true;
    }
    return false;
  };

  LinePoint prev = p0;
  double alpha = 1.0;
  for (int it = 0; it < 20; ++it) {
    LinePoint p = fn.eval(alpha);
    if (!std::isfinite(p.value)) {
      // overshot into an infeasible region; treat as high value and shrink
      if (prev.alpha == 0.0) {
        alpha *= 0.25;
        continue;
      }
      return zoom(prev, p) || (have_decrease ? (out = best, true) : false);
    }
    if (p.value < best.value) {
      best = p;
      have_decrease = p.value < f0;
    }
    if (wolfe_ok(p)) {
      out = p;
      return true;
    }
    if (p.value > f0 + kC1 * alpha * d0 || (it > 0 && p.value >= prev.value)) {
      return zoom(prev, p) || (have_decrease ? (out = best, true) : false);
    }
    if (p.deriv >= 0.0) {
      return zoom(p, prev) || (have_decrease ? (out = best, true) : false);
    }
    prev = p;
    alpha = std::min(alpha * 2.0, 1e8);
  }
  if (have_decrease) {
    out = best;
    return true;
  }
  return false;
}

}  // namespace

void FitConfig::validate() const {
  if (n_sim < 1 || n_starts < 1 || warmup_steps < 0 || lbfgs_memory < 1 || max_lbfgs_iters < 1)
    throw std::invalid_argument("FitConfig: counts must be positive");
  if (!(grad_tol > 0.0) || !(warmup_lr > 0.0))
    throw std::invalid_argument("FitConfig: tolerances must be positive");
}

LbfgsResult lbfgsMaximizeImpl(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                              const FitConfig& cfg) {
  const int dim = static_cast<int>(x0.size());
  LbfgsResult res;
  res.x = x0;
  if (dim == 0) {
    res.value = f(x0, nullptr);
    res.converged = true;
    return res;
  }

  Eigen::VectorXd x = x0;
  Eigen::VectorXd g(dim);
  double v = f(x, &g);
  if (!std::isfinite(v)) throw std::invalid_argument("lbfgs_maximize: objective not finite at x0");

  std::deque<Eigen::VectorXd> svec, yvec;
  std::deque<double> rho;
  Eigen::VectorXd q(dim), gphi(dim);
  std::vector<double> alpha_buf;

  res.x = x;
  res.value = v;
  res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();

  int resets = 0;
  for (int iter = 0; iter < cfg.max_lbfgs_iters; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (v > res.value || (v == res.value && gnorm < res.grad_inf_norm)) {
      res.x = x;
      res.value = v;
      res.grad_inf_norm = gnorm;
    }
    if (gnorm < cfg.grad_tol) {
      res.converged = true;
      res.iterations = iter;
      res.x = x;
      res.value = v;
      res.grad_inf_norm = gnorm;
      return res;
    }

    // two-loop recursion on phi = -f
    gphi = -g;
    q = gphi;
    const std::size_t m = svec.size();
    alpha_buf.assign(m, 0.0);
    for (std::size_t k = m; k-- > 0;) {
      alpha_buf[k] = rho[k] * svec[k].dot(q);
      q -= alpha_buf[k] * yvec[k];
    }
    if (m > 0) {
      const double gamma = svec.back().dot(yvec.back()) / yvec.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho[k] * yvec[k].dot(q);
      q += (alpha_buf[k] - beta) * svec[k];
    }
    Eigen::VectorXd d = -q;  // descent direction for phi

    if (!(gphi.dot(d) < 0.0)) {
      // degenerate curvature information: restart from steepest ascent
      svec.clear();
      yvec.clear();
      rho.clear();
      d = -gphi;
    }

    LineSearchFn ls(f, x, d);
    LinePoint p0{0.0, -v, gphi.dot(d)};
    LinePoint acc;
    if (!wolfe_line_search(ls, p0, acc)) {
      if (!svec.empty()) {
        // discard memory and retry once along the gradient
        svec.clear();
        yvec.clear();
        rho.clear();
        if (++resets <= 5) continue;
      }
      res.iterations = iter;
      return res;  // best-so-far, non-converged
    }

    const Eigen::VectorXd x_new = x + acc.alpha * d;
    const Eigen::VectorXd g_new = ls.last_grad().size() ? ls.last_grad() : g;
    // ls.last_* correspond to the final eval; re-evaluate if the accepted
    // alpha differs from the last probed point
    Eigen::VectorXd gn(dim);
    double vn;
    if (ls.last_x().size() == dim && (ls.last_x() - x_new).lpNorm<Eigen::Infinity>() == 0.0) {
      vn = -acc.value;
      gn = ls.last_grad();
    } else {
      vn = f(x_new, &gn);
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yy = (-gn) - (-g);  // gradient difference of phi
    const double sy = s.dot(yy);
    if (sy > 1e-10 * s.norm() * yy.norm()) {
      svec.push_back(s);
      yvec.push_back(yy);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(svec.size()) > cfg.lbfgs_memory) {
        svec.pop_front();
        yvec.pop_front();
        rho.pop_front();
      }
    }
    x = x_new;
    g = gn;
    v = vn;
    res.iterations = iter + 1;
  }
  const double gnorm = g.lpNorm<Eigen::Infinity>();
  if (v > res.value) {
    res.x = x;
    res.value = v;
    res.grad_inf_norm = gnorm;
  }
  res.converged = gnorm < cfg.grad_tol;
  if (res.converged) {
    res.x = x;
    res.value = v;
    res.grad_inf_norm = gnorm;
  }
  return res;
}

LbfgsResult lbfgs_maximize(const ObjectiveFn& f, const Eigen::VectorXd& x0, const FitConfig& cfg) {
  cfg.validate();
  return lbfgsMaximizeImpl(f, x0, cfg);
}

Eigen::VectorXd warmup_gd(const Eigen::VectorXd& x0, const ObjectiveFn& f, const FitConfig& cfg,
                          int n_obs) {
  if (n_obs < 1) throw std::invalid_argument("warmup_gd: n_obs must be positive");
  const double scale = 1.0 / static_cast<double>(n_obs);
  Eigen::VectorXd g(x0.size());
  const double v0 = f(x0, &g);
  if (!std::isfinite(v0)) throw std::invalid_argument("warmup_gd: objective not finite at start");

  double lr = cfg.warmup_lr;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    Eigen::VectorXd x = x0;
    bool bad = false;
    for (int step = 0; step < cfg.warmup_steps; ++step) {
      const double v = f(x, &g);
      if (!std::isfinite(v)) {
        bad = true;
        break;
      }
      x += (lr * scale) * g;
    }
    if (!bad) {
      const double v_end = f(x, nullptr);
      if (std::isfinite(v_end) && v_end >= v0) return x;
    }
    lr *= 0.5;
  }
  return x0;  // warmup never hurts the start
}

Eigen::VectorXd random_start(Rng& rng, const BestFamily& family) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(family.dim());
  if (family.include_questions)
    for (int i = 0; i < 72; ++i) theta[i] = 0.5 * rng.normal();
  if (family.include_satisfaction)
    for (int t = 0; t < 2; ++t) {
      theta[family.alpha_slope_index(t)] = 0.1 + 0.9 * rng.u01();
      for (int k = 0; k < 6; ++k) theta[family.alpha_cut_index(t, k)] = 0.5 * (k + 1);
    }
  if (family.include_rankings) {
    theta[family.lambda_index(0)] = 0.1 + 0.9 * rng.u01();
    if (!family.shared_lambda) theta[family.lambda_index(1)] = 0.1 + 0.9 * rng.u01();
  }
  return theta;
}

Eigen::VectorXd random_start(Rng& rng, const CatieFamily& family) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(family.dim());
  for (int j = 0; j < family.n_questions; ++j) {
    theta[family.beta_index(j, 0)] = 0.5 * rng.normal();
    theta[family.beta_index(j, 1)] = 0.5 * rng.normal();
  }
  theta[family.alpha_index(0)] = 0.5 * rng.normal();
  theta[family.alpha_index(1)] = 0.1 + 0.9 * rng.u01();
  return theta;
}

namespace {

template <class Likelihood, class Family>
FitResult run_fit(const Likelihood& lik, const Family& family, const FitConfig& cfg, int n_obs) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto constraints = build_constraints(family);
  ObjectiveFn objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) -> double {
    double v;
    if (g) {
      v = lik.value_and_grad(x, *g);
      const double pv = penalty(constraints, x, g);
      return v + pv;
    }
    v = lik.value(x);
    return v + penalty(constraints, x, nullptr);
  };

  FitResult result;
  result.mc_seed = lik.draws().seed_tag;
  result.n_sim = lik.draws().count();
  result.family_id = family.id();
  for (int s = 0; s < cfg.n_starts; ++s) {
    Rng rng = Rng(cfg.seed).substream(1000 + static_cast<std::uint64_t>(s));
    StartRecord rec;
    rec.start_index = s;
    Eigen::VectorXd theta0 = random_start(rng, family);
    rec.initial_value = objective(theta0, nullptr);
    const Eigen::VectorXd warm = warmup_gd(theta0, objective, cfg, n_obs);
    rec.warmup_value = objective(warm, nullptr);
    const LbfgsResult lb = lbfgsMaximizeImpl(objective, warm, cfg);
    rec.final_value = lb.value;
    rec.grad_inf_norm = lb.grad_inf_norm;
    rec.iterations = lb.iterations;
    rec.converged = lb.converged;
    result.starts.push_back(rec);
    if (result.best_start < 0 || lb.value > result.penalized) {
      result.best_start = s;
      result.penalized = lb.value;
      result.theta = lb.x;
      result.grad_inf_norm = lb.grad_inf_norm;
      result.converged = lb.converged;
    }
  }
  result.loglik = lik.value(result.theta);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace

FitResult fit_best(const BestDataset& data, const BestFamily& family, const FitConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("fit_best: empty dataset");
  const std::uint64_t mc_seed = Rng(cfg.seed).substream(777).next_u64();
  BestLikelihood lik(data, McDraws::standard_normal(cfg.n_sim, 2, mc_seed), family);
  return run_fit(lik, family, cfg, static_cast<int>(data.size()));
}

FitResult fit_catie(const CatieDataset& data, const CatieFamily& family, const FitConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("fit_catie: empty dataset");
  const std::uint64_t mc_seed = Rng(cfg.seed).substream(777).next_u64();
  CatieLikelihood lik(data, McDraws::standard_normal(cfg.n_sim, 1, mc_seed), family);
  return run_fit(lik, family, cfg, static_cast<int>(data.size()));
}

}  // namespace luq
