#include "luq/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace luq {

std::vector<CandidateFamily> default_candidates() {
  return {
      {"full", BestFamily::from_id("full")},
      {"no-ranking", BestFamily::from_id("no-ranking")},
      {"no-satisfaction", BestFamily::from_id("no-satisfaction")},
      {"shared-lambda", BestFamily::from_id("shared-lambda")},
  };
}

std::pair<BestDataset, BestDataset> split_dataset(const BestDataset& data, double train_fraction,
                                                  Rng& rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split_dataset: fraction must be in (0,1)");
  const int n = static_cast<int>(data.size());
  const int n_train = static_cast<int>(std::floor(train_fraction * n));
  if (n_train < 1 || n_train >= n)
    throw std::invalid_argument("split_dataset: a side of the split would be empty");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.uniform_int(0, i)]);
  BestDataset train, validation;
  train.reserve(n_train);
  validation.reserve(n - n_train);
  for (int i = 0; i < n; ++i)
    (i < n_train ? train : validation).push_back(data[idx[i]]);
  return {std::move(train), std::move(validation)};
}

double heldout_partial_loglik(const Eigen::VectorXd& theta, const BestFamily& family,
                              const BestDataset& validation, const McDraws& draws) {
  return mc_loglik_best(theta, family, validation, draws);
}

double uniform_completion_per_obs(const BestFamily& family) {
  double c = 0.0;
  if (!family.include_questions) c += 24.0 * std::log(0.5);
  if (!family.include_rankings) c += 2.0 * std::log(1.0 / 6.0);
  if (!family.include_satisfaction) c += 2.0 * std::log(1.0 / 7.0);
  return c;
}

PolicyProb deterministic_policy_prob(const PolicyBundle& bundle) {
  PolicyProb p;
  p.p1 = [&bundle](const TrajectoryBest& t, int a1) {
    return bundle.stage1_policy(t) == a1 ? 1.0 : 0.0;
  };
  p.p2 = [&bundle](const TrajectoryBest& t, const ActionSet& a2) {
    return bundle.stage2_policy(t) == a2 ? 1.0 : 0.0;
  };
  return p;
}

PolicyProb behavioral_policy_prob() {
  PolicyProb p;
  p.p1 = [](const TrajectoryBest&, int) { return behavioral_prob_a1(); };
  p.p2 = [](const TrajectoryBest& t, const ActionSet& a2) {
    return behavioral_prob_a2(t.a1, t.c, a2);
  };
  return p;
}

double ipw_value(const PolicyProb& policy, const BestDataset& validation) {
  if (validation.empty()) throw std::invalid_argument("ipw_value: empty validation set");
  double sum = 0.0;
  for (const TrajectoryBest& t : validation) {
    const double mu1 = behavioral_prob_a1();
    const double mu2 = behavioral_prob_a2(t.a1, t.c, t.a2);
    if (!(mu1 > 0.0) || !(mu2 > 0.0))
      throw std::runtime_error("ipw_value: observed action has zero behavioral probability");
    sum += policy.p1(t, t.a1) * policy.p2(t, t.a2) / (mu1 * mu2) * t.b2;
  }
  return sum / static_cast<double>(validation.size());
}

SelectionReport run_selection(const BestDataset& data, const SelectionConfig& cfg) {
  Rng split_rng = Rng(cfg.seed).substream(61);
  const auto [train, validation] = split_dataset(data, cfg.train_fraction, split_rng);

  SelectionReport report;
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_ipw = -std::numeric_limits<double>::infinity();
  for (const CandidateFamily& cand : default_candidates()) {
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.seed = Rng(cfg.seed).substream(62).next_u64();
    const FitResult fit = fit_best(train, cand.family, fit_cfg);
    const McDraws draws = McDraws::standard_normal(fit.n_sim, 2, fit.mc_seed);

    SelectionRow row;
    row.id = cand.id;
    row.fit_converged = fit.converged;
    row.heldout_loglik = heldout_partial_loglik(fit.theta, cand.family, validation, draws);

    auto engine = std::make_shared<const BestPosteriorEngine>(fit.theta, cand.family, draws);
    PolicyBuildConfig pcfg;
    pcfg.trees = cfg.trees;
    pcfg.stage1_seed = Rng(cfg.seed).substream(63).next_u64();
    PolicyBundle policy = build_best_policy(PolicyKind::luq, train, engine, pcfg);
    fit_stage1(policy, train, pcfg);
    row.ipw = ipw_value(deterministic_policy_prob(policy), validation);

    if (row.heldout_loglik > best_ll) {
      best_ll = row.heldout_loglik;
      report.best_by_loglik = row.id;
    }
    if (row.ipw > best_ipw) {
      best_ipw = row.ipw;
      report.best_by_ipw = row.id;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace luq
