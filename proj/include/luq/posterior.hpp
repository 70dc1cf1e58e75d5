#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <vector>

#include "luq/latent_lik.hpp"

namespace luq {

struct PosteriorWeight {
  Eigen::VectorXd weights;  // posterior mean of E, on the simplex
  double ess = 0.0;         // effective sample size of the self-normalized weights
};

class DegeneratePosteriorError : public std::runtime_error {
 public:
  explicit DegeneratePosteriorError(const std::string& what) : std::runtime_error(what) {}
};

// Self-normalized MC mean over arbitrary latent points:
//   sum_j E(v_j) exp(logw_j) / sum_j exp(logw_j).
// Exposed so hand-built grids can stand in for prior draws.
PosteriorWeight self_normalized_mean(const Eigen::MatrixXd& e_points,
                                     const std::vector<double>& log_weights);

// E[E | H2] for the BEST model: weighs each draw by the H2-measurable
// factors of f_theta (both question blocks, both rankings, B1). The B2
// factor is dropped, which equals summing it out exactly.
class BestPosteriorEngine {
 public:
  BestPosteriorEngine(Eigen::VectorXd theta, BestFamily family, McDraws draws);

  PosteriorWeight weights(const TrajectoryBest& h2) const;
  // log w_j for each draw (diagnostic / test hook)
  std::vector<double> log_weights(const TrajectoryBest& h2) const;

  const McDraws& draws() const { return draws_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  const BestFamily& family() const { return family_; }

 private:
  Eigen::VectorXd theta_;
  BestFamily family_;
  McDraws draws_;
  Eigen::Matrix3Xd e_draws_;
  std::vector<double> lsp_, lsm_;      // 24 x n_sim question tables
  std::vector<double> tau_center_[6];  // per-center Kendall tau to draw ranks
  double lambda_[2] = {0.0, 0.0};
  double logz_[2] = {0.0, 0.0};
  double slope_ = 0.0;
  double cuts_[6] = {0, 0, 0, 0, 0, 0};
};

// E[E | H1] for the CATIE model: only the question factors are
// H1-measurable (X carries no information about V).
class CatiePosteriorEngine {
 public:
  CatiePosteriorEngine(Eigen::VectorXd theta, CatieFamily family, McDraws draws);

  PosteriorWeight weights(const TrajectoryCatie& h1) const;
  std::vector<double> log_weights(const TrajectoryCatie& h1) const;

  const McDraws& draws() const { return draws_; }
  const Eigen::VectorXd& theta() const { return theta_; }

 private:
  Eigen::VectorXd theta_;
  CatieFamily family_;
  McDraws draws_;
  Eigen::Matrix2Xd e_draws_;
  std::vector<double> lsp_, lsm_;
};

// Operation-level wrappers.
PosteriorWeight posterior_mean_E(const Eigen::VectorXd& theta, const BestFamily& family,
                                 const TrajectoryBest& h2, const McDraws& draws);
PosteriorWeight posterior_mean_E(const Eigen::VectorXd& theta, const CatieFamily& family,
                                 const TrajectoryCatie& h1, const McDraws& draws);

// Mean absolute difference of the first posterior component between the
// oracle parameters (independent draws) and a fitted model, over a set of
// test histories.
double posterior_error_metric(const Eigen::VectorXd& theta_true, const CatieFamily& family_true,
                              const Eigen::VectorXd& theta_hat, const CatieFamily& family_hat,
                              const CatieDataset& test_histories, const McDraws& mc_oracle,
                              const McDraws& mc_fit);

}  // namespace luq
