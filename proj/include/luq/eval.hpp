#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "luq/dtr.hpp"
#include "luq/fitter.hpp"

namespace luq {

struct ValueEstimate {
  double mean = 0.0;     // mean oracle utility E^T Y per rollout
  double se = 0.0;       // sample SD / sqrt(n)
  double mean_b2 = 0.0;  // mean reported satisfaction (for IPW cross-checks)
  int rollouts = 0;
};

// Simulates fresh trajectories with treatments chosen by the bundle (or by
// the generator's own randomization for kind obs) and scores each with the
// hidden true weights. Deterministic given (params, policy, seed, n).
ValueEstimate rollout_value(const GenParamsBest& params, const PolicyBundle& policy,
                            int n_rollouts, std::uint64_t seed);

struct CatieValueArgs {
  const CatiePolicy* policy = nullptr;  // null: behavioral randomization
};
ValueEstimate rollout_value_catie(const GenParamsCatie& params, const CatieValueArgs& args,
                                  int n_rollouts, std::uint64_t seed);

// ||theta_hat - theta_true||_1 / dim.
double mae_theta(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta_true);

// ---------------------------------------------------------------------------
// Seed-loop experiments
// ---------------------------------------------------------------------------

struct BestExperimentConfig {
  int n = 600;
  int n_seeds = 10;
  std::uint64_t first_seed = 1;
  bool ablation = false;
  FitConfig fit;
  int n_rollouts = 100000;
  BaggedTreesConfig trees;
  bool b2_use_trees = true;
};

struct BestSeedRow {
  std::uint64_t seed = 0;
  double mae = 0.0;
  double v_obs = 0.0, v_luql = 0.0, v_known = 0.0, v_b2 = 0.0, v_naive = 0.0;
  double loglik_hat = 0.0, loglik_true = 0.0, grad_inf_norm = 0.0;
  bool fit_converged = false;
  double fit_seconds = 0.0;
};

struct BestExperimentReport {
  BestExperimentConfig config;
  std::vector<BestSeedRow> rows;
  BestSeedRow mean;  // aggregates recomputed from rows
  BestSeedRow stddev;
};

BestExperimentReport run_best_experiment(const BestExperimentConfig& cfg);

struct CatieExperimentConfig {
  int n = 200;
  int n_seeds = 10;
  std::uint64_t first_seed = 1;
  FitConfig fit;
  int n_rollouts = 100000;
  int n_test_histories = 1000;
};

struct CatieSeedRow {
  std::uint64_t seed = 0;
  double post_err_luq = 0.0, post_err_butler = 0.0;
  double v_obs = 0.0, v_luq = 0.0, v_butler = 0.0;
  double gain_luq = 0.0, gain_butler = 0.0;
  bool fit_converged_luq = false, fit_converged_butler = false;
  double fit_seconds = 0.0;
};

struct CatieExperimentReport {
  CatieExperimentConfig config;
  std::vector<CatieSeedRow> rows;
  CatieSeedRow mean;
  CatieSeedRow stddev;
};

CatieExperimentReport run_catie_experiment(const CatieExperimentConfig& cfg);

// Aggregation helpers shared with the CLI writers.
template <class Row, class Get>
double column_mean(const std::vector<Row>& rows, Get get) {
  double s = 0.0;
  for (const auto& r : rows) s += get(r);
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}
template <class Row, class Get>
double column_sd(const std::vector<Row>& rows, Get get) {
  if (rows.size() < 2) return 0.0;
  const double m = column_mean(rows, get);
  double s = 0.0;
  for (const auto& r : rows) s += (get(r) - m) * (get(r) - m);
  return std::sqrt(s / static_cast<double>(rows.size() - 1));
}

}  // namespace luq
