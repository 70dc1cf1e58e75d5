#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "luq/best_model.hpp"
#include "luq/catie_model.hpp"
#include "luq/rng.hpp"

namespace luq {

// ---------------------------------------------------------------------------
// Design rows (fixed column orders, intercept first)
// ---------------------------------------------------------------------------

// Outcome regression design: intercept, X2 (3), I(k in A2) (4), and all
// X2_j * I(k in A2) interactions (12). 20 columns.
Eigen::VectorXd best_stage2_design(const TrajectoryBest& t, const ActionSet& a2);
std::vector<std::string> best_stage2_design_names();

// Stage-1 features: X1 (3), W1 (12), W1R ranks (3), A1 one-hot (4). 22 columns.
Eigen::VectorXd best_stage1_features(const TrajectoryBest& t, int a1);
std::vector<std::string> best_stage1_feature_names();

// Full-history features for the satisfaction-outcome baseline: X1, W1, W1R,
// A1 one-hot, B1, X2, W2, W2R, A2 indicators. 45 columns.
Eigen::VectorXd best_h2_features(const TrajectoryBest& t, const ActionSet& a2);
std::vector<std::string> best_h2_feature_names();

// CATIE outcome design: (1, X, A, A*X). 12 columns, correctly specified for
// the generator.
Eigen::VectorXd catie_design(const TrajectoryCatie& t, int a);
std::vector<std::string> catie_design_names();

// ---------------------------------------------------------------------------
// Beta-binomial logistic regression (mean: logit link; dispersion: log link)
// ---------------------------------------------------------------------------

struct BetaBinomModel {
  Eigen::VectorXd coef;
  double log_s = 0.0;
  int n_trials = 10;
  bool converged = false;
  bool fallback_binomial = false;  // set when the MLE failed and a plain
                                   // binomial fit was used instead

  double predict_mu(const Eigen::VectorXd& x) const;
  double predict_mean(const Eigen::VectorXd& x) const;  // n_trials * mu
};

// Log-likelihood and gradient over (coef, log_s); exposed for tests.
double betabinom_loglik(const std::vector<int>& y, const Eigen::MatrixXd& X, int n_trials,
                        const Eigen::VectorXd& coef, double log_s, Eigen::VectorXd* grad);

BetaBinomModel fit_betabinom(const std::vector<int>& y, const Eigen::MatrixXd& X, int n_trials);

// ---------------------------------------------------------------------------
// Ordinary least squares
// ---------------------------------------------------------------------------

struct LinearModel {
  Eigen::VectorXd coef;
  double predict(const Eigen::VectorXd& x) const { return coef.dot(x); }
};

// Throws on rank deficiency, naming the redundant columns when names are
// provided.
LinearModel fit_linear(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const std::vector<std::string>* col_names = nullptr);

// ---------------------------------------------------------------------------
// Bagged CART regression trees (all features at every split)
// ---------------------------------------------------------------------------

struct BaggedTreesConfig {
  int n_trees = 100;
  int min_node_size = 25;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const Eigen::VectorXd& x) const;
  // smallest training-row count over the leaves (structural diagnostics)
  int min_leaf_count = 0;
};

struct BaggedTreesModel {
  BaggedTreesConfig config;
  std::vector<RegressionTree> trees;
  double predict(const Eigen::VectorXd& x) const;
};

BaggedTreesModel fit_bagged_trees(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                  const BaggedTreesConfig& config);

}  // namespace luq
