#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <string>

#include "luq/posterior.hpp"
#include "luq/regressors.hpp"

namespace luq {

enum class PolicyKind { luq, known, b2, naive, obs };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

// A two-stage decision rule with its fitted components. The weight source
// depends on the kind: luq reads the posterior engine, known reads the
// trajectory's hidden E (oracle baseline), naive uses (1/3,1/3,1/3), b2
// scores actions by a direct satisfaction regression, obs defers to the
// generator's randomization.
struct PolicyBundle {
  PolicyKind kind = PolicyKind::obs;

  std::array<BetaBinomModel, 3> outcome_models;  // E[Y_j | X2, A2]
  bool has_outcome_models = false;

  BaggedTreesModel b2_model;  // E[B2 | H2, A2]
  bool has_b2_model = false;
  BetaBinomModel b2_bb_model;  // beta-binomial alternative (config option)
  bool b2_uses_trees = true;

  std::shared_ptr<const BestPosteriorEngine> posterior;

  BaggedTreesModel stage1_model;
  bool has_stage1 = false;

  Eigen::Vector3d weights_for(const TrajectoryBest& h2) const;
  double q2_score(const TrajectoryBest& h2, const ActionSet& a2) const;
  ActionSet stage2_policy(const TrajectoryBest& h2) const;
  // max_{a2 feasible} q2_score, sharing one posterior evaluation
  double q2_best_score(const TrajectoryBest& h2) const;
  int stage1_policy(const TrajectoryBest& h1) const;
};

struct PolicyBuildConfig {
  BaggedTreesConfig trees;        // stage-1 model and the b2 baseline
  bool b2_use_trees = true;       // trees vs beta-binomial for the B2 outcome
  std::uint64_t stage1_seed = 0;  // per-kind tree seeds derive from this
};

// Fits the stage-2 components of a bundle from the observed dataset.
// `posterior` may be null for kinds that do not need it.
PolicyBundle build_best_policy(PolicyKind kind, const BestDataset& data,
                               std::shared_ptr<const BestPosteriorEngine> posterior,
                               const PolicyBuildConfig& cfg);

// Pseudo-outcomes max_{a2} Q2(H2, a2) regressed on (H1, A1) features.
void fit_stage1(PolicyBundle& bundle, const BestDataset& data, const PolicyBuildConfig& cfg);

// Single-stage CATIE policy: argmax_a posterior-weighted predicted outcomes;
// null posterior means oracle weights (hidden E).
struct CatiePolicy {
  std::shared_ptr<const CatiePosteriorEngine> posterior;
  std::array<LinearModel, 2> outcome_models;
  int decide(const TrajectoryCatie& h1) const;
};

}  // namespace luq
