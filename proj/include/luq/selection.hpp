#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "luq/dtr.hpp"
#include "luq/eval.hpp"

namespace luq {

struct CandidateFamily {
  std::string id;
  BestFamily family;
};

// Shipped candidate set: full model, no-ranking, no-satisfaction
// (Butler-style), shared concentration.
std::vector<CandidateFamily> default_candidates();

// Disjoint exhaustive random split; train gets floor(fraction * N) rows.
std::pair<BestDataset, BestDataset> split_dataset(const BestDataset& data, double train_fraction,
                                                  Rng& rng);

// Validation-set MC partial log-likelihood at fitted parameters (no refit).
double heldout_partial_loglik(const Eigen::VectorXd& theta, const BestFamily& family,
                              const BestDataset& validation, const McDraws& draws);

// Log-probability of the factors a family leaves unmodeled, under uniform
// reference distributions, per observation. Adding n_val * this to the
// partial log-likelihood makes candidates with different factor sets valid
// probability measures over the same space, hence comparable.
double uniform_completion_per_obs(const BestFamily& family);

// Treatment-rule probabilities pi(a | h) for the IPW estimator; deterministic
// rules are indicator functions.
struct PolicyProb {
  std::function<double(const TrajectoryBest&, int)> p1;
  std::function<double(const TrajectoryBest&, const ActionSet&)> p2;
};

PolicyProb deterministic_policy_prob(const PolicyBundle& bundle);
PolicyProb behavioral_policy_prob();

// E_V[ pi1(A1|H1) pi2(A2|H2) / (mu1 mu2) * B2 ] over the validation rows,
// with the SMART's known randomization as the behavioral policy.
double ipw_value(const PolicyProb& policy, const BestDataset& validation);

struct SelectionRow {
  std::string id;
  double heldout_loglik = 0.0;
  double ipw = 0.0;
  bool fit_converged = false;
};

struct SelectionReport {
  std::vector<SelectionRow> rows;
  std::string best_by_loglik;
  std::string best_by_ipw;
};

struct SelectionConfig {
  double train_fraction = 0.8;
  FitConfig fit;
  BaggedTreesConfig trees;
  std::uint64_t seed = 0;
};

SelectionReport run_selection(const BestDataset& data, const SelectionConfig& cfg);

}  // namespace luq
