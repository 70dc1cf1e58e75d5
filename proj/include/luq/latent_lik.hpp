#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "luq/best_model.hpp"
#include "luq/catie_model.hpp"

namespace luq {

// Fixed matrix of latent draws shared by every objective, gradient and
// posterior evaluation within one fit (common random numbers: the optimizer
// sees a smooth deterministic objective).
struct McDraws {
  Eigen::MatrixXd draws;  // n_sim x latent dimension
  std::uint64_t seed_tag = 0;

  int count() const { return static_cast<int>(draws.rows()); }
  int dim() const { return static_cast<int>(draws.cols()); }
  static McDraws standard_normal(int n_sim, int dim, std::uint64_t seed);
};

// ---------------------------------------------------------------------------
// Parameter layout
// ---------------------------------------------------------------------------

// Which factors of the BEST conditional density are modeled. Toggles define
// the model-selection candidate set; the fitted vector packs the blocks of
// the active factors back to back as (beta | alpha | lambda).
struct BestFamily {
  bool include_questions = true;     // 24 Bernoulli question factors + beta
  bool include_rankings = true;      // 2 Mallows factors + lambda
  bool include_satisfaction = true;  // 2 ordinal factors + alpha
  bool shared_lambda = false;        // single concentration for both timepoints

  int n_beta() const { return include_questions ? 72 : 0; }
  int n_alpha() const { return include_satisfaction ? 14 : 0; }
  int n_lambda() const { return include_rankings ? (shared_lambda ? 1 : 2) : 0; }
  int dim() const { return n_beta() + n_alpha() + n_lambda(); }

  // t in {0,1}, question k in 0..11, coefficient c in {0:intercept,1,2}
  int beta_index(int t, int k, int c) const { return t * 36 + k * 3 + c; }
  int alpha_slope_index(int t) const { return n_beta() + t * 7; }
  int alpha_cut_index(int t, int k) const { return n_beta() + t * 7 + 1 + k; }  // k in 0..5
  int lambda_index(int t) const { return n_beta() + n_alpha() + (shared_lambda ? 0 : t); }

  Eigen::VectorXd pack(const GenParamsBest& params) const;
  std::string id() const;
  static BestFamily from_id(const std::string& id);
};

struct CatieFamily {
  bool include_satisfaction = true;  // Poisson factor; off reproduces the Butler-style fit
  int n_questions = 10;

  int dim() const { return 2 * n_questions + 2; }
  int beta_index(int j, int c) const { return 2 * j + c; }  // c in {0:intercept,1:slope}
  int alpha_index(int c) const { return 2 * n_questions + c; }  // c in {0:alpha0,1:alpha1}

  Eigen::VectorXd pack(const GenParamsCatie& params) const;
  std::string id() const { return include_satisfaction ? "luq" : "butler"; }
  static CatieFamily from_id(const std::string& id);
};

// ---------------------------------------------------------------------------
// Constraints and soft penalty
// ---------------------------------------------------------------------------

// One linear combination of theta assumed positive on the parameter space.
struct LinearConstraint {
  std::vector<std::pair<int, double>> terms;
  double eval(const Eigen::VectorXd& theta) const;
};

std::vector<LinearConstraint> build_constraints(const BestFamily& family);
std::vector<LinearConstraint> build_constraints(const CatieFamily& family);

Eigen::VectorXd constraint_values(const std::vector<LinearConstraint>& cs,
                                  const Eigen::VectorXd& theta);

// Soft constraint term -(1/100) sum_i exp(-100 c_i); adds its gradient into
// grad when non-null. Returns -inf if an exponent would overflow.
double penalty(const std::vector<LinearConstraint>& cs, const Eigen::VectorXd& theta,
               Eigen::VectorXd* grad);

// ---------------------------------------------------------------------------
// Reference conditional densities (straightforward implementations used by
// tests and small cases; the engines below agree with these exactly)
// ---------------------------------------------------------------------------

double best_log_f_conditional(const Eigen::VectorXd& theta, const BestFamily& family,
                              const TrajectoryBest& traj, const Eigen::Vector2d& v);
double catie_log_f_conditional(const Eigen::VectorXd& theta, const CatieFamily& family,
                               const TrajectoryCatie& traj, double v);

// ---------------------------------------------------------------------------
// Monte-Carlo marginal partial log-likelihood engines
// ---------------------------------------------------------------------------

// value(theta)        = sum_i [ logsumexp_j log f(H3_i | v_j) - log n_sim ]
// value_and_grad also accumulates the exact gradient via per-observation
// softmax weights over draws. Deterministic for any worker count.
class BestLikelihood {
 public:
  BestLikelihood(const BestDataset& data, McDraws draws, BestFamily family);

  double value(const Eigen::VectorXd& theta) const;
  double value_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

  const BestFamily& family() const { return family_; }
  const McDraws& draws() const { return draws_; }
  int n_obs() const { return static_cast<int>(wbits_.size()); }

 private:
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;

  BestFamily family_;
  McDraws draws_;
  // per-draw tables
  Eigen::Matrix3Xd e_draws_;           // softmax embedding of each draw
  std::vector<double> v1_, v2_;        // draw coordinates
  std::vector<double> tau_center_[6];  // tau_center_[c][j]: tau from center c to draw j's rank
  // per-observation compact fields
  std::vector<std::array<std::uint8_t, 24>> wbits_;  // t*12+k
  std::vector<std::uint8_t> w1r_, w2r_, b1_, b2_;
  std::vector<Eigen::Vector3d> x2_, y_;
};

class CatieLikelihood {
 public:
  CatieLikelihood(const CatieDataset& data, McDraws draws, CatieFamily family);

  double value(const Eigen::VectorXd& theta) const;
  double value_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

  const CatieFamily& family() const { return family_; }
  const McDraws& draws() const { return draws_; }
  int n_obs() const { return static_cast<int>(b_.size()); }

 private:
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;

  CatieFamily family_;
  McDraws draws_;
  std::vector<double> v_, e1_;  // draw coordinate and Phi(draw)
  std::vector<std::vector<std::uint8_t>> w_;  // [i][question]
  std::vector<int> b_;
  std::vector<double> lgamma_b1_;  // lgamma(B+1)
  std::vector<double> y2_, dy_;    // u_ij = y2_i + e1_j * dy_i
};

// Convenience wrappers matching the operation-level API.
double mc_loglik_best(const Eigen::VectorXd& theta, const BestFamily& family,
                      const BestDataset& data, const McDraws& draws);
double mc_loglik_catie(const Eigen::VectorXd& theta, const CatieFamily& family,
                       const CatieDataset& data, const McDraws& draws);

}  // namespace luq
