#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "luq/latent_lik.hpp"
#include "luq/rng.hpp"

namespace luq {

// Maximized objective: returns the value at x and fills *grad when non-null.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct FitConfig {
  int n_sim = 1000;
  int n_starts = 5;
  int warmup_steps = 500;
  double warmup_lr = 1e-3;
  int lbfgs_memory = 10;
  double grad_tol = 1e-7;
  int max_lbfgs_iters = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StartRecord {
  int start_index = 0;
  double initial_value = 0.0;
  double warmup_value = 0.0;
  double final_value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct FitResult {
  Eigen::VectorXd theta;
  double loglik = 0.0;         // unpenalized MC log-likelihood at theta
  double penalized = 0.0;      // optimized objective at theta
  double grad_inf_norm = 0.0;  // of the penalized objective at theta
  std::vector<StartRecord> starts;
  int best_start = -1;
  bool converged = false;
  double wall_seconds = 0.0;
  std::uint64_t mc_seed = 0;
  int n_sim = 0;
  std::string family_id;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS ascent with a strong-Wolfe line search (c1 = 1e-4,
// c2 = 0.9). Stops when the gradient sup-norm drops below grad_tol or the
// iteration cap is reached; the best iterate seen is returned either way.
LbfgsResult lbfgs_maximize(const ObjectiveFn& f, const Eigen::VectorXd& x0, const FitConfig& cfg);

// Plain gradient ascent on the mean-per-observation objective. If the final
// value falls below the initial one, the learning rate is halved and the
// warmup restarted, at most five times.
Eigen::VectorXd warmup_gd(const Eigen::VectorXd& x0, const ObjectiveFn& f, const FitConfig& cfg,
                          int n_obs);

Eigen::VectorXd random_start(Rng& rng, const BestFamily& family);
Eigen::VectorXd random_start(Rng& rng, const CatieFamily& family);

// Full pipeline: one draw matrix, n_starts independent chains of
// (random start -> warmup -> L-BFGS), best penalized objective wins.
FitResult fit_best(const BestDataset& data, const BestFamily& family, const FitConfig& cfg);
FitResult fit_catie(const CatieDataset& data, const CatieFamily& family, const FitConfig& cfg);

}  // namespace luq
