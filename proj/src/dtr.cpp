#include "luq/dtr.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "luq/parallel.hpp"

namespace luq {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::luq: return "luql";
    case PolicyKind::known: return "known";
    case PolicyKind::b2: return "b2";
    case PolicyKind::naive: return "naive";
    case PolicyKind::obs: return "obs";
  }
  throw std::logic_error("unreachable");
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "luql" || s == "luq") return PolicyKind::luq;
  if (s == "known") return PolicyKind::known;
  if (s == "b2") return PolicyKind::b2;
  if (s == "naive") return PolicyKind::naive;
  if (s == "obs") return PolicyKind::obs;
  throw std::invalid_argument("unknown policy kind: " + s);
}

Eigen::Vector3d PolicyBundle::weights_for(const TrajectoryBest& h2) const {
  switch (kind) {
    case PolicyKind::luq: {
      if (!posterior) throw std::logic_error("luq policy without posterior engine");
      const Eigen::VectorXd w = posterior->weights(h2).weights;
      return Eigen::Vector3d(w[0], w[1], w[2]);
    }
    case PolicyKind::known:
      return h2.e;
    case PolicyKind::naive:
      return Eigen::Vector3d::Constant(1.0 / 3.0);
    default:
      throw std::logic_error("policy kind has no weight vector");
  }
}

double PolicyBundle::q2_score(const TrajectoryBest& h2, const ActionSet& a2) const {
  const auto feasible = feasible_actions(h2.a1, h2.c);
  if (std::find(feasible.begin(), feasible.end(), a2) == feasible.end())
    throw std::invalid_argument("q2_score: infeasible action for this history");
  if (kind == PolicyKind::b2) {
    if (b2_uses_trees) {
      if (!has_b2_model) throw std::logic_error("b2 policy without fitted model");
      return b2_model.predict(best_h2_features(h2, a2));
    }
    return 1.0 + b2_bb_model.predict_mean(best_stage2_design(h2, a2));
  }
  if (!has_outcome_models) throw std::logic_error("q2_score: outcome models not fitted");
  const Eigen::Vector3d w = weights_for(h2);
  const Eigen::VectorXd x = best_stage2_design(h2, a2);
  Eigen::Vector3d pred;
  for (int j = 0; j < 3; ++j) pred[j] = outcome_models[j].predict_mean(x);
  return w.dot(pred);
}

namespace {
struct ScoredAction {
  ActionSet action;
  double score;
};
}  // namespace

static ScoredAction best_feasible(const PolicyBundle& b, const TrajectoryBest& h2) {
  const auto feasible = feasible_actions(h2.a1, h2.c);
  ScoredAction out{feasible.front(), -std::numeric_limits<double>::infinity()};
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  if (b.kind != PolicyKind::b2) w = b.weights_for(h2);  // one posterior call per history
  for (const ActionSet& a2 : feasible) {
    double score;
    if (b.kind == PolicyKind::b2) {
      score = b.b2_uses_trees ? b.b2_model.predict(best_h2_features(h2, a2))
                              : 1.0 + b.b2_bb_model.predict_mean(best_stage2_design(h2, a2));
    } else {
      const Eigen::VectorXd x = best_stage2_design(h2, a2);
      Eigen::Vector3d pred;
      for (int j = 0; j < 3; ++j) pred[j] = b.outcome_models[j].predict_mean(x);
      score = w.dot(pred);
    }
    if (score > out.score) {
      out.score = score;
      out.action = a2;  // feasible_actions is canonically ordered; ties keep the first
    }
  }
  return out;
}

ActionSet PolicyBundle::stage2_policy(const TrajectoryBest& h2) const {
  if (kind == PolicyKind::obs)
    throw std::logic_error("observational policy has no deterministic stage-2 rule");
  return best_feasible(*this, h2).action;
}

double PolicyBundle::q2_best_score(const TrajectoryBest& h2) const {
  if (kind == PolicyKind::obs)
    throw std::logic_error("observational policy has no stage-2 scorer");
  return best_feasible(*this, h2).score;
}

int PolicyBundle::stage1_policy(const TrajectoryBest& h1) const {
  if (!has_stage1) throw std::logic_error("stage-1 model not fitted");
  int best = 1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a1 = 1; a1 <= 4; ++a1) {
    const double score = stage1_model.predict(best_stage1_features(h1, a1));
    if (score > best_score) {
      best_score = score;
      best = a1;
    }
  }
  return best;
}

PolicyBundle build_best_policy(PolicyKind kind, const BestDataset& data,
                               std::shared_ptr<const BestPosteriorEngine> posterior,
                               const PolicyBuildConfig& cfg) {
  PolicyBundle bundle;
  bundle.kind = kind;
  bundle.posterior = std::move(posterior);
  bundle.b2_uses_trees = cfg.b2_use_trees;
  if (kind == PolicyKind::obs) return bundle;
  if (kind == PolicyKind::luq && !bundle.posterior)
    throw std::invalid_argument("build_best_policy: luq kind needs a posterior engine");

  const int n = static_cast<int>(data.size());
  if (kind == PolicyKind::b2) {
    if (cfg.b2_use_trees) {
      Eigen::VectorXd resp(n);
      Eigen::MatrixXd feats(n, 45);
      for (int i = 0; i < n; ++i) {
        resp[i] = data[i].b2;
        feats.row(i) = best_h2_features(data[i], data[i].a2).transpose();
      }
      BaggedTreesConfig tc = cfg.trees;
      tc.seed = Rng(cfg.stage1_seed).substream(40).next_u64();
      bundle.b2_model = fit_bagged_trees(resp, feats, tc);
      bundle.has_b2_model = true;
    } else {
      std::vector<int> resp(n);
      Eigen::MatrixXd X(n, 20);
      for (int i = 0; i < n; ++i) {
        resp[i] = data[i].b2 - 1;  // levels 1..7 as counts 0..6
        X.row(i) = best_stage2_design(data[i], data[i].a2).transpose();
      }
      bundle.b2_bb_model = fit_betabinom(resp, X, 6);
    }
    return bundle;
  }

  // outcome models shared by luq / known / naive
  Eigen::MatrixXd X(n, 20);
  for (int i = 0; i < n; ++i) X.row(i) = best_stage2_design(data[i], data[i].a2).transpose();
  for (int j = 0; j < 3; ++j) {
    std::vector<int> yj(n);
    for (int i = 0; i < n; ++i) yj[i] = data[i].y[j];
    bundle.outcome_models[j] = fit_betabinom(yj, X, 10);
  }
  bundle.has_outcome_models = true;
  return bundle;
}

void fit_stage1(PolicyBundle& bundle, const BestDataset& data, const PolicyBuildConfig& cfg) {
  if (bundle.kind == PolicyKind::obs)
    throw std::invalid_argument("fit_stage1: observational policy has no stage-1 model");
  const int n = static_cast<int>(data.size());
  Eigen::VectorXd pseudo(n);
  parallel_blocks(n, 32, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) pseudo[i] = bundle.q2_best_score(data[i]);
  });
  Eigen::MatrixXd feats(n, 22);
  for (int i = 0; i < n; ++i)
    feats.row(i) = best_stage1_features(data[i], data[i].a1).transpose();
  BaggedTreesConfig tc = cfg.trees;
  tc.seed = Rng(cfg.stage1_seed).substream(50 + static_cast<int>(bundle.kind)).next_u64();
  bundle.stage1_model = fit_bagged_trees(pseudo, feats, tc);
  bundle.has_stage1 = true;
}

int CatiePolicy::decide(const TrajectoryCatie& h1) const {
  Eigen::Vector2d w;
  if (posterior) {
    const Eigen::VectorXd pw = posterior->weights(h1).weights;
    w << pw[0], pw[1];
  } else {
    w = h1.e;  // oracle weights
  }
  double best_score = -std::numeric_limits<double>::infinity();
  int best = 0;
  for (int a = 0; a <= 1; ++a) {
    const Eigen::VectorXd x = catie_design(h1, a);
    const double score =
        w[0] * outcome_models[0].predict(x) + w[1] * outcome_models[1].predict(x);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

}  // namespace luq
