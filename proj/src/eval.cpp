#include "luq/eval.hpp"

#include <cmath>
#include <stdexcept>

#include "luq/parallel.hpp"

namespace luq {

ValueEstimate rollout_value(const GenParamsBest& params, const PolicyBundle& policy,
                            int n_rollouts, std::uint64_t seed) {
  if (n_rollouts < 1) throw std::invalid_argument("rollout_value: n_rollouts must be positive");
  const bool behavioral = policy.kind == PolicyKind::obs;
  if (!behavioral && !policy.has_stage1)
    throw std::invalid_argument("rollout_value: policy has no fitted stage-1 rule");

  const Rng root(seed);
  const std::size_t n = static_cast<std::size_t>(n_rollouts);
  const std::size_t block = 256;
  const std::size_t nb = num_blocks(n, block);
  std::vector<double> bsum(nb, 0.0), bsq(nb, 0.0), bb2(nb, 0.0);

  parallel_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double s = 0.0, sq = 0.0, sb2 = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const Rng stream = root.substream(i);
      Rng nature = stream.substream(0);
      Rng assign = stream.substream(1);
      Rng chance = stream.substream(2);
      TrajectoryBest t;
      sample_stage1(params, t, nature);
      t.a1 = behavioral ? assign.uniform_int(1, 4) : policy.stage1_policy(t);
      sample_post_a1(params, t, nature);
      t.c = chance.uniform_int(1, 4);
      if (behavioral) {
        const auto feasible = feasible_actions(t.a1, t.c);
        t.a2 = feasible[assign.uniform_int(0, static_cast<int>(feasible.size()) - 1)];
      } else {
        t.a2 = policy.stage2_policy(t);
      }
      sample_post_a2(params, t, nature);
      const double u = t.e.dot(Eigen::Vector3d(t.y[0], t.y[1], t.y[2]));
      s += u;
      sq += u * u;
      sb2 += t.b2;
    }
    bsum[b] = s;
    bsq[b] = sq;
    bb2[b] = sb2;
  });

  double sum = 0.0, sq = 0.0, sb2 = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    sum += bsum[b];
    sq += bsq[b];
    sb2 += bb2[b];
  }
  ValueEstimate v;
  v.rollouts = n_rollouts;
  v.mean = sum / n_rollouts;
  v.mean_b2 = sb2 / n_rollouts;
  const double var = std::max(0.0, sq / n_rollouts - v.mean * v.mean);
  v.se = std::sqrt(var / n_rollouts);
  return v;
}

ValueEstimate rollout_value_catie(const GenParamsCatie& params, const CatieValueArgs& args,
                                  int n_rollouts, std::uint64_t seed) {
  if (n_rollouts < 1) throw std::invalid_argument("rollout_value_catie: n_rollouts must be positive");
  const Rng root(seed);
  const std::size_t n = static_cast<std::size_t>(n_rollouts);
  const std::size_t block = 512;
  const std::size_t nb = num_blocks(n, block);
  std::vector<double> bsum(nb, 0.0), bsq(nb, 0.0);

  parallel_blocks(n, block, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double s = 0.0, sq = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const Rng stream = root.substream(i);
      Rng nature = stream.substream(0);
      Rng assign = stream.substream(1);
      TrajectoryCatie t;
      t.v = nature.normal();
      const double e1 = 0.5 * std::erfc(-t.v / std::sqrt(2.0));
      t.e << e1, 1.0 - e1;
      for (int j = 0; j < 5; ++j) t.x[j] = nature.normal();
      for (int j = 0; j < 10; ++j)
        t.w[j] = nature.bernoulli(sigmoid(params.beta0[j] + params.beta1[j] * t.v)) ? 1 : 0;
      t.a = args.policy ? args.policy->decide(t) : (assign.bernoulli(0.5) ? 1 : 0);
      for (int j = 0; j < 2; ++j)
        t.y[j] = catie_mean_outcome(params, j, t.x, t.a) + nature.normal();
      const double u = catie_utility(t);
      s += u;
      sq += u * u;
    }
    bsum[b] = s;
    bsq[b] = sq;
  });

  double sum = 0.0, sq = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    sum += bsum[b];
    sq += bsq[b];
  }
  ValueEstimate v;
  v.rollouts = n_rollouts;
  v.mean = sum / n_rollouts;
  const double var = std::max(0.0, sq / n_rollouts - v.mean * v.mean);
  v.se = std::sqrt(var / n_rollouts);
  return v;
}

double mae_theta(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& theta_true) {
  if (theta_hat.size() != theta_true.size() || theta_hat.size() == 0)
    throw std::invalid_argument("mae_theta: dimension mismatch");
  return (theta_hat - theta_true).lpNorm<1>() / static_cast<double>(theta_hat.size());
}

BestExperimentReport run_best_experiment(const BestExperimentConfig& cfg) {
  BestExperimentReport report;
  report.config = cfg;
  const BestFamily family;  // full model

  for (int s = 0; s < cfg.n_seeds; ++s) {
    const std::uint64_t world_seed = cfg.first_seed + static_cast<std::uint64_t>(s);
    BestSeedRow row;
    row.seed = world_seed;

    Rng params_rng = Rng(world_seed).substream(21);
    GenParamsBest params = draw_best_params(params_rng);
    if (cfg.ablation) {
      Rng ab_rng = Rng(world_seed).substream(22);
      params = apply_ablation(params, ab_rng);
    }
    const BestDataset data =
        simulate_best(params, cfg.n, Rng(world_seed).substream(23).next_u64());

    FitConfig fit_cfg = cfg.fit;
    fit_cfg.seed = Rng(world_seed).substream(24).next_u64();
    const FitResult fit = fit_best(data, family, fit_cfg);
    row.fit_seconds = fit.wall_seconds;
    row.fit_converged = fit.converged;
    row.grad_inf_norm = fit.grad_inf_norm;
    row.loglik_hat = fit.loglik;

    const Eigen::VectorXd theta_true = family.pack(params);
    const McDraws draws = McDraws::standard_normal(fit.n_sim, 2, fit.mc_seed);
    row.loglik_true = mc_loglik_best(theta_true, family, data, draws);
    row.mae = mae_theta(fit.theta, theta_true);

    auto engine = std::make_shared<const BestPosteriorEngine>(fit.theta, family, draws);
    PolicyBuildConfig pcfg;
    pcfg.trees = cfg.trees;
    pcfg.b2_use_trees = cfg.b2_use_trees;
    pcfg.stage1_seed = Rng(world_seed).substream(25).next_u64();

    PolicyBundle obs = build_best_policy(PolicyKind::obs, data, nullptr, pcfg);
    PolicyBundle luq = build_best_policy(PolicyKind::luq, data, engine, pcfg);
    PolicyBundle known = build_best_policy(PolicyKind::known, data, nullptr, pcfg);
    PolicyBundle b2 = build_best_policy(PolicyKind::b2, data, nullptr, pcfg);
    PolicyBundle naive = build_best_policy(PolicyKind::naive, data, nullptr, pcfg);
    fit_stage1(luq, data, pcfg);
    fit_stage1(known, data, pcfg);
    fit_stage1(b2, data, pcfg);
    fit_stage1(naive, data, pcfg);

    const std::uint64_t rollout_seed = Rng(world_seed).substream(26).next_u64();
    row.v_obs = rollout_value(params, obs, cfg.n_rollouts, rollout_seed).mean;
    row.v_luql = rollout_value(params, luq, cfg.n_rollouts, rollout_seed).mean;
    row.v_known = rollout_value(params, known, cfg.n_rollouts, rollout_seed).mean;
    row.v_b2 = rollout_value(params, b2, cfg.n_rollouts, rollout_seed).mean;
    row.v_naive = rollout_value(params, naive, cfg.n_rollouts, rollout_seed).mean;
    report.rows.push_back(row);
  }

  auto& rows = report.rows;
  auto agg = [&](auto get, double& mean_slot, double& sd_slot) {
    mean_slot = column_mean(rows, get);
    sd_slot = column_sd(rows, get);
  };
  agg([](const BestSeedRow& r) { return r.mae; }, report.mean.mae, report.stddev.mae);
  agg([](const BestSeedRow& r) { return r.v_obs; }, report.mean.v_obs, report.stddev.v_obs);
  agg([](const BestSeedRow& r) { return r.v_luql; }, report.mean.v_luql, report.stddev.v_luql);
  agg([](const BestSeedRow& r) { return r.v_known; }, report.mean.v_known, report.stddev.v_known);
  agg([](const BestSeedRow& r) { return r.v_b2; }, report.mean.v_b2, report.stddev.v_b2);
  agg([](const BestSeedRow& r) { return r.v_naive; }, report.mean.v_naive, report.stddev.v_naive);
  agg([](const BestSeedRow& r) { return r.fit_seconds; }, report.mean.fit_seconds,
      report.stddev.fit_seconds);
  return report;
}

CatieExperimentReport run_catie_experiment(const CatieExperimentConfig& cfg) {
  CatieExperimentReport report;
  report.config = cfg;
  const CatieFamily luq_family = CatieFamily::from_id("luq");
  const CatieFamily butler_family = CatieFamily::from_id("butler");

  for (int s = 0; s < cfg.n_seeds; ++s) {
    const std::uint64_t world_seed = cfg.first_seed + static_cast<std::uint64_t>(s);
    CatieSeedRow row;
    row.seed = world_seed;

    const CatieWorld world = make_catie_world(world_seed, cfg.n);

    FitConfig fit_cfg = cfg.fit;
    fit_cfg.seed = Rng(world_seed).substream(24).next_u64();
    const FitResult fit_luq = fit_catie(world.data, luq_family, fit_cfg);
    const FitResult fit_butler = fit_catie(world.data, butler_family, fit_cfg);
    row.fit_seconds = fit_luq.wall_seconds + fit_butler.wall_seconds;
    row.fit_converged_luq = fit_luq.converged;
    row.fit_converged_butler = fit_butler.converged;

    // posterior error against the oracle, fresh histories and independent draws
    const CatieDataset test = simulate_catie(world.params, cfg.n_test_histories,
                                             Rng(world_seed).substream(32).next_u64());
    const Eigen::VectorXd theta_true = luq_family.pack(world.params);
    const McDraws mc_oracle = McDraws::standard_normal(
        cfg.fit.n_sim, 1, Rng(world_seed).substream(31).next_u64());
    const McDraws mc_fit_luq = McDraws::standard_normal(fit_luq.n_sim, 1, fit_luq.mc_seed);
    const McDraws mc_fit_butler =
        McDraws::standard_normal(fit_butler.n_sim, 1, fit_butler.mc_seed);
    row.post_err_luq = posterior_error_metric(theta_true, luq_family, fit_luq.theta, luq_family,
                                              test, mc_oracle, mc_fit_luq);
    row.post_err_butler = posterior_error_metric(theta_true, luq_family, fit_butler.theta,
                                                 butler_family, test, mc_oracle, mc_fit_butler);

    // outcome models (correctly-specified linear regression)
    const int n = static_cast<int>(world.data.size());
    Eigen::MatrixXd X(n, 12);
    for (int i = 0; i < n; ++i)
      X.row(i) = catie_design(world.data[i], world.data[i].a).transpose();
    const auto names = catie_design_names();
    CatiePolicy pol_luq, pol_butler;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd yj(n);
      for (int i = 0; i < n; ++i) yj[i] = world.data[i].y[j];
      pol_luq.outcome_models[j] = fit_linear(yj, X, &names);
      pol_butler.outcome_models[j] = pol_luq.outcome_models[j];
    }
    pol_luq.posterior =
        std::make_shared<const CatiePosteriorEngine>(fit_luq.theta, luq_family, mc_fit_luq);
    pol_butler.posterior = std::make_shared<const CatiePosteriorEngine>(
        fit_butler.theta, butler_family, mc_fit_butler);

    const std::uint64_t rollout_seed = Rng(world_seed).substream(26).next_u64();
    row.v_obs = rollout_value_catie(world.params, {}, cfg.n_rollouts, rollout_seed).mean;
    row.v_luq =
        rollout_value_catie(world.params, {&pol_luq}, cfg.n_rollouts, rollout_seed).mean;
    row.v_butler =
        rollout_value_catie(world.params, {&pol_butler}, cfg.n_rollouts, rollout_seed).mean;
    row.gain_luq = row.v_luq - row.v_obs;
    row.gain_butler = row.v_butler - row.v_obs;
    report.rows.push_back(row);
  }

  auto& rows = report.rows;
  auto agg = [&](auto get, double& mean_slot, double& sd_slot) {
    mean_slot = column_mean(rows, get);
    sd_slot = column_sd(rows, get);
  };
  agg([](const CatieSeedRow& r) { return r.post_err_luq; }, report.mean.post_err_luq,
      report.stddev.post_err_luq);
  agg([](const CatieSeedRow& r) { return r.post_err_butler; }, report.mean.post_err_butler,
      report.stddev.post_err_butler);
  agg([](const CatieSeedRow& r) { return r.v_obs; }, report.mean.v_obs, report.stddev.v_obs);
  agg([](const CatieSeedRow& r) { return r.v_luq; }, report.mean.v_luq, report.stddev.v_luq);
  agg([](const CatieSeedRow& r) { return r.v_butler; }, report.mean.v_butler,
      report.stddev.v_butler);
  agg([](const CatieSeedRow& r) { return r.gain_luq; }, report.mean.gain_luq,
      report.stddev.gain_luq);
  agg([](const CatieSeedRow& r) { return r.gain_butler; }, report.mean.gain_butler,
      report.stddev.gain_butler);
  agg([](const CatieSeedRow& r) { return r.fit_seconds; }, report.mean.fit_seconds,
      report.stddev.fit_seconds);
  return report;
}

}  // namespace luq
