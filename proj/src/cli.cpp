#include "luq/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "luq/dataset_io.hpp"
#include "luq/eval.hpp"
#include "luq/model_io.hpp"
#include "luq/parallel.hpp"
#include "luq/selection.hpp"
#include "luq/svg_plot.hpp"

namespace luq {

namespace {

constexpr const char* kToolVersion = "luq 0.1.0";

std::string config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_line(const nlohmann::json& config, std::uint64_t seed) {
  return std::string(kToolVersion) + " config=" + config_hash(config) +
         " seed=" + std::to_string(seed);
}

void stamp(nlohmann::json& j, const nlohmann::json& config, std::uint64_t seed) {
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config_hash(config);
  j["seed"] = seed;
  j["config"] = config;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("schema error in " + path + ": " + e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

// Applies a JSON config file first; explicitly passed flags then win.
void merge_config_file(CLI::App* cmd, const std::string& path) {
  const nlohmann::json j = load_json(path);
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt) throw std::runtime_error("config key not recognized: " + key);
    if (opt->count() > 0) continue;  // flags win
    opt->add_result(value.is_string() ? value.get<std::string>() : value.dump());
  }
}

struct FitFlags {
  int n_sim = 1000;
  int starts = 5;
  int warmup = 500;
  double warmup_lr = 1e-3;
  int max_iters = 2000;
  double grad_tol = 1e-7;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n-sim", n_sim, "Monte-Carlo draws for the marginal likelihood");
    cmd->add_option("--starts", starts, "number of random optimizer starts");
    cmd->add_option("--warmup", warmup, "gradient-descent warmup steps per start");
    cmd->add_option("--warmup-lr", warmup_lr, "warmup learning rate");
    cmd->add_option("--max-iters", max_iters, "L-BFGS iteration cap");
    cmd->add_option("--grad-tol", grad_tol, "sup-norm gradient tolerance");
  }
  FitConfig to_config(std::uint64_t seed) const {
    FitConfig cfg;
    cfg.n_sim = n_sim;
    cfg.n_starts = starts;
    cfg.warmup_steps = warmup;
    cfg.warmup_lr = warmup_lr;
    cfg.max_lbfgs_iters = max_iters;
    cfg.grad_tol = grad_tol;
    cfg.seed = seed;
    return cfg;
  }
  nlohmann::json to_json() const {
    return {{"n_sim", n_sim},     {"starts", starts},       {"warmup", warmup},
            {"warmup_lr", warmup_lr}, {"max_iters", max_iters}, {"grad_tol", grad_tol}};
  }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& model, int n, std::uint64_t seed, const std::string& out_dir) {
  ensure_dir(out_dir);
  const nlohmann::json config{{"command", "simulate"}, {"model", model}, {"n", n}, {"seed", seed}};
  const std::string prov = provenance_line(config, seed);

  if (model == "best" || model == "best-ablation") {
    Rng params_rng = Rng(seed).substream(21);
    GenParamsBest params = draw_best_params(params_rng);
    if (model == "best-ablation") {
      Rng ab_rng = Rng(seed).substream(22);
      params = apply_ablation(params, ab_rng);
    }
    const BestDataset data = simulate_best(params, n, Rng(seed).substream(23).next_u64());
    write_best_csv(out_dir + "/dataset.csv", data, prov);
    nlohmann::json pj = to_json(params);
    stamp(pj, config, seed);
    write_json(out_dir + "/params.json", pj);
  } else if (model == "catie") {
    const CatieWorld world = make_catie_world(seed, n);
    write_catie_csv(out_dir + "/dataset.csv", world.data, prov);
    nlohmann::json pj = to_json(world.params);
    stamp(pj, config, seed);
    write_json(out_dir + "/params.json", pj);
  } else {
    throw CLI::ValidationError("--model", "unknown model: " + model);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const std::string& data_path, const std::string& model, const std::string& family_id,
            const FitFlags& flags, std::uint64_t seed, const std::string& out_path) {
  const nlohmann::json config{{"command", "fit"},   {"data", data_path}, {"model", model},
                              {"family", family_id}, {"seed", seed},      {"fit", flags.to_json()}};
  FitResult fit;
  if (model == "best") {
    const BestDataset data = read_best_csv(data_path);
    fit = fit_best(data, BestFamily::from_id(family_id), flags.to_config(seed));
  } else if (model == "catie") {
    const CatieDataset data = read_catie_csv(data_path);
    fit = fit_catie(data, CatieFamily::from_id(family_id), flags.to_config(seed));
  } else {
    throw CLI::ValidationError("--model", "unknown model: " + model);
  }
  nlohmann::json j = fit_result_to_json(fit, model);
  stamp(j, config, seed);
  write_json(out_path, j);
  write_json(out_path + ".timing.json", nlohmann::json{{"wall_seconds", fit.wall_seconds}});
  if (!fit.converged)
    std::cerr << "warning: best start did not reach grad tolerance (|grad|_inf = "
              << fit.grad_inf_norm << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// posterior
// ---------------------------------------------------------------------------

int cmd_posterior(const std::string& data_path, const std::string& fit_path,
                  const std::string& out_path) {
  const nlohmann::json fj = load_json(fit_path);
  std::string model;
  const FitResult fit = fit_result_from_json(fj, &model);
  const nlohmann::json config{
      {"command", "posterior"}, {"data", data_path}, {"fit", fit_path}};
  const std::uint64_t seed = fj.value("seed", std::uint64_t{0});
  const std::string prov = provenance_line(config, seed);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"id"};
  if (model == "best") {
    const BestDataset data = read_best_csv(data_path);
    const BestFamily family = BestFamily::from_id(fit.family_id);
    const McDraws draws = McDraws::standard_normal(fit.n_sim, 2, fit.mc_seed);
    const BestPosteriorEngine engine(fit.theta, family, draws);
    for (int q = 1; q <= 3; ++q) header.push_back("w" + std::to_string(q));
    header.push_back("ess");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const PosteriorWeight w = engine.weights(data[i]);
      rows.push_back({std::to_string(i), format_double(w.weights[0]), format_double(w.weights[1]),
                      format_double(w.weights[2]), format_double(w.ess)});
    }
  } else if (model == "catie") {
    const CatieDataset data = read_catie_csv(data_path);
    const CatieFamily family = CatieFamily::from_id(fit.family_id);
    const McDraws draws = McDraws::standard_normal(fit.n_sim, 1, fit.mc_seed);
    const CatiePosteriorEngine engine(fit.theta, family, draws);
    for (int q = 1; q <= 2; ++q) header.push_back("w" + std::to_string(q));
    header.push_back("ess");
    for (std::size_t i = 0; i < data.size(); ++i) {
      const PosteriorWeight w = engine.weights(data[i]);
      rows.push_back({std::to_string(i), format_double(w.weights[0]), format_double(w.weights[1]),
                      format_double(w.ess)});
    }
  } else {
    throw std::runtime_error("schema error in " + fit_path + ": unknown model " + model);
  }
  write_csv(out_path, header, rows, prov);
  return 0;
}

// ---------------------------------------------------------------------------
// dtr
// ---------------------------------------------------------------------------

int cmd_dtr(const std::string& data_path, const std::string& fit_path, const std::string& kind_s,
            int n_trees, int min_node, bool b2_betabinom, std::uint64_t seed,
            const std::string& out_path) {
  const PolicyKind kind = policy_kind_from_string(kind_s);
  const nlohmann::json config{{"command", "dtr"},     {"data", data_path},
                              {"fit", fit_path},      {"kind", kind_s},
                              {"trees", n_trees},     {"min_node", min_node},
                              {"b2_betabinom", b2_betabinom}, {"seed", seed}};
  const BestDataset data = read_best_csv(data_path);

  std::shared_ptr<const BestPosteriorEngine> engine;
  if (kind == PolicyKind::luq) {
    if (fit_path.empty()) throw CLI::ValidationError("--fit", "luql policy needs a fit file");
    std::string model;
    const FitResult fit = fit_result_from_json(load_json(fit_path), &model);
    if (model != "best")
      throw std::runtime_error("schema error in " + fit_path + ": expected a best-model fit");
    const BestFamily family = BestFamily::from_id(fit.family_id);
    engine = std::make_shared<const BestPosteriorEngine>(
        fit.theta, family, McDraws::standard_normal(fit.n_sim, 2, fit.mc_seed));
  }
  PolicyBuildConfig pcfg;
  pcfg.trees.n_trees = n_trees;
  pcfg.trees.min_node_size = min_node;
  pcfg.b2_use_trees = !b2_betabinom;
  pcfg.stage1_seed = seed;
  PolicyBundle bundle = build_best_policy(kind, data, engine, pcfg);
  if (kind != PolicyKind::obs) fit_stage1(bundle, data, pcfg);

  nlohmann::json j = policy_to_json(bundle);
  stamp(j, config, seed);
  write_json(out_path, j);
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& params_path, const std::string& policy_path, int rollouts,
                 std::uint64_t seed, const std::string& out_path) {
  const nlohmann::json pj = load_json(params_path);
  const nlohmann::json config{{"command", "evaluate"},
                              {"params", params_path},
                              {"policy", policy_path},
                              {"rollouts", rollouts},
                              {"seed", seed}};
  if (pj.at("model").get<std::string>() != "best")
    throw std::runtime_error("evaluate currently scores BEST policies; params file is not a BEST world");
  const GenParamsBest params = best_params_from_json(pj);
  const PolicyBundle bundle = policy_from_json(load_json(policy_path));
  const ValueEstimate v = rollout_value(params, bundle, rollouts, seed);
  write_csv(out_path, {"kind", "value_mean", "value_se", "mean_b2", "rollouts"},
            {{to_string(bundle.kind), format_double(v.mean), format_double(v.se),
              format_double(v.mean_b2), std::to_string(v.rollouts)}},
            provenance_line(config, seed));
  return 0;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

int cmd_select(const std::string& data_path, double train_frac, const FitFlags& flags,
               std::uint64_t seed, const std::string& out_path) {
  const nlohmann::json config{{"command", "select"},
                              {"data", data_path},
                              {"train_fraction", train_frac},
                              {"seed", seed},
                              {"fit", flags.to_json()}};
  const BestDataset data = read_best_csv(data_path);
  SelectionConfig cfg;
  cfg.train_fraction = train_frac;
  cfg.fit = flags.to_config(seed);
  cfg.seed = seed;
  const SelectionReport report = run_selection(data, cfg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report.rows)
    rows.push_back({r.id, format_double(r.heldout_loglik), format_double(r.ipw),
                    r.fit_converged ? "1" : "0"});
  rows.push_back({"chosen_by_loglik", report.best_by_loglik, "", ""});
  rows.push_back({"chosen_by_ipw", report.best_by_ipw, "", ""});
  write_csv(out_path, {"family", "heldout_loglik", "ipw_value", "fit_converged"}, rows,
            provenance_line(config, seed));
  return 0;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

int cmd_experiment(const std::string& model, const std::string& profile, int seeds,
                   std::uint64_t first_seed, std::vector<int> n_list, int rollouts,
                   const FitFlags& flags_in, const std::string& out_dir) {
  ensure_dir(out_dir);
  FitFlags flags = flags_in;
  int eff_seeds = seeds;
  int eff_rollouts = rollouts;
  if (profile == "fast") {
    if (eff_seeds == 0) eff_seeds = 3;
    if (n_list.empty()) n_list = {model == "catie" ? 200 : 300};
    if (flags.n_sim == 0) flags.n_sim = 250;
    if (eff_rollouts == 0) eff_rollouts = 20000;
  } else if (profile == "full") {
    if (eff_seeds == 0) eff_seeds = 10;
    if (n_list.empty()) n_list = {model == "catie" ? 200 : 600};
    if (flags.n_sim == 0) flags.n_sim = 1000;
    if (eff_rollouts == 0) eff_rollouts = 100000;
  } else {
    throw CLI::ValidationError("--profile", "unknown profile: " + profile);
  }

  const nlohmann::json config{{"command", "experiment"}, {"model", model},
                              {"profile", profile},      {"seeds", eff_seeds},
                              {"first_seed", first_seed}, {"n_list", n_list},
                              {"rollouts", eff_rollouts}, {"fit", flags.to_json()}};
  const std::string prov = provenance_line(config, first_seed);

  if (model == "catie") {
    CatieExperimentConfig cfg;
    cfg.n = n_list.front();
    cfg.n_seeds = eff_seeds;
    cfg.first_seed = first_seed;
    cfg.fit = flags.to_config(0);
    cfg.n_rollouts = eff_rollouts;
    const CatieExperimentReport rep = run_catie_experiment(cfg);
    std::vector<std::vector<std::string>> rows, trows;
    for (const auto& r : rep.rows) {
      rows.push_back({std::to_string(r.seed), format_double(r.post_err_luq),
                      format_double(r.post_err_butler), format_double(r.v_obs),
                      format_double(r.v_luq), format_double(r.v_butler),
                      format_double(r.gain_luq), format_double(r.gain_butler),
                      r.fit_converged_luq ? "1" : "0", r.fit_converged_butler ? "1" : "0"});
      trows.push_back({std::to_string(r.seed), format_double(r.fit_seconds)});
    }
    write_csv(out_dir + "/report.csv",
              {"seed", "post_err_luq", "post_err_butler", "v_obs", "v_luq", "v_butler",
               "gain_luq", "gain_butler", "fit_converged_luq", "fit_converged_butler"},
              rows, prov);
    write_csv(out_dir + "/summary.csv",
              {"stat", "post_err_luq", "post_err_butler", "v_obs", "v_luq", "v_butler",
               "gain_luq", "gain_butler"},
              {{"mean", format_double(rep.mean.post_err_luq), format_double(rep.mean.post_err_butler),
                format_double(rep.mean.v_obs), format_double(rep.mean.v_luq),
                format_double(rep.mean.v_butler), format_double(rep.mean.gain_luq),
                format_double(rep.mean.gain_butler)},
               {"sd", format_double(rep.stddev.post_err_luq),
                format_double(rep.stddev.post_err_butler), format_double(rep.stddev.v_obs),
                format_double(rep.stddev.v_luq), format_double(rep.stddev.v_butler),
                format_double(rep.stddev.gain_luq), format_double(rep.stddev.gain_butler)}},
              prov);
    write_csv(out_dir + "/timing.csv", {"seed", "fit_seconds"}, trows, prov);
    return 0;
  }
  if (model != "best" && model != "best-ablation")
    throw CLI::ValidationError("--model", "unknown model: " + model);

  std::vector<std::vector<std::string>> rows, srows, trows;
  std::vector<double> mae_means;
  for (int n : n_list) {
    BestExperimentConfig cfg;
    cfg.n = n;
    cfg.n_seeds = eff_seeds;
    cfg.first_seed = first_seed;
    cfg.ablation = model == "best-ablation";
    cfg.fit = flags.to_config(0);
    cfg.n_rollouts = eff_rollouts;
    const BestExperimentReport rep = run_best_experiment(cfg);
    for (const auto& r : rep.rows) {
      rows.push_back({std::to_string(n), std::to_string(r.seed), format_double(r.mae),
                      format_double(r.v_obs), format_double(r.v_luql), format_double(r.v_known),
                      format_double(r.v_b2), format_double(r.v_naive),
                      format_double(r.loglik_hat), format_double(r.loglik_true),
                      format_double(r.grad_inf_norm), r.fit_converged ? "1" : "0"});
      trows.push_back({std::to_string(n), std::to_string(r.seed), format_double(r.fit_seconds)});
    }
    srows.push_back({std::to_string(n), "mean", format_double(rep.mean.mae),
                     format_double(rep.mean.v_obs), format_double(rep.mean.v_luql),
                     format_double(rep.mean.v_known), format_double(rep.mean.v_b2),
                     format_double(rep.mean.v_naive)});
    srows.push_back({std::to_string(n), "sd", format_double(rep.stddev.mae),
                     format_double(rep.stddev.v_obs), format_double(rep.stddev.v_luql),
                     format_double(rep.stddev.v_known), format_double(rep.stddev.v_b2),
                     format_double(rep.stddev.v_naive)});
    mae_means.push_back(rep.mean.mae);
  }
  write_csv(out_dir + "/report.csv",
            {"n", "seed", "mae", "v_obs", "v_luql", "v_known", "v_b2", "v_naive", "loglik_hat",
             "loglik_true", "grad_inf_norm", "fit_converged"},
            rows, prov);
  write_csv(out_dir + "/summary.csv",
            {"n", "stat", "mae", "v_obs", "v_luql", "v_known", "v_b2", "v_naive"}, srows, prov);
  write_csv(out_dir + "/timing.csv", {"n", "seed", "fit_seconds"}, trows, prov);
  if (n_list.size() >= 2) {
    PlotSeries s;
    s.label = "mean MAE";
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      s.x.push_back(n_list[i]);
      s.y.push_back(mae_means[i]);
    }
    write_svg_line_plot(out_dir + "/mae_vs_n.svg", "Latent-model error by sample size", "N",
                        "mean |theta_hat - theta_0| / dim", {s});
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"LUQ-Learning: latent-utility Q-learning pipeline"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (default: all cores)");

  std::string config_path;

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a world and simulate a trial dataset");
  std::string sim_model = "best";
  int sim_n = 600;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  sim->add_option("--model", sim_model, "best | best-ablation | catie");
  sim->add_option("--n", sim_n, "number of trajectories");
  sim->add_option("--seed", sim_seed, "world seed");
  sim->add_option("--out", sim_out, "output directory");

  // fit
  auto* fit = app.add_subcommand("fit", "maximize the MC partial likelihood");
  std::string fit_data, fit_model = "best", fit_family, fit_out = "fit.json";
  std::uint64_t fit_seed = 1;
  FitFlags fit_flags;
  fit->add_option("--data", fit_data, "dataset csv")->required();
  fit->add_option("--model", fit_model, "best | catie");
  fit->add_option("--family", fit_family, "model family (default: full / luq)");
  fit->add_option("--seed", fit_seed, "fit seed");
  fit->add_option("--out", fit_out, "output fit json");
  fit_flags.attach(fit);

  // posterior
  auto* post = app.add_subcommand("posterior", "posterior preference weights per patient");
  std::string post_data, post_fit, post_out = "weights.csv";
  post->add_option("--data", post_data, "dataset csv")->required();
  post->add_option("--fit", post_fit, "fit json")->required();
  post->add_option("--out", post_out, "output weights csv");

  // dtr
  auto* dtr = app.add_subcommand("dtr", "assemble a two-stage policy");
  std::string dtr_data, dtr_fit, dtr_kind = "luql", dtr_out = "policy.json";
  int dtr_trees = 100, dtr_min_node = 25;
  bool dtr_b2_bb = false;
  std::uint64_t dtr_seed = 1;
  dtr->add_option("--data", dtr_data, "dataset csv")->required();
  dtr->add_option("--fit", dtr_fit, "fit json (needed for kind luql)");
  dtr->add_option("--kind", dtr_kind, "luql | known | b2 | naive");
  dtr->add_option("--trees", dtr_trees, "trees in the bagged ensembles");
  dtr->add_option("--min-node", dtr_min_node, "minimum node size");
  dtr->add_flag("--b2-betabinom", dtr_b2_bb, "use beta-binomial instead of trees for the b2 outcome");
  dtr->add_option("--seed", dtr_seed, "tree bootstrap seed");
  dtr->add_option("--out", dtr_out, "output policy json");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "oracle rollout value of a policy");
  std::string eval_params, eval_policy, eval_out = "values.csv";
  int eval_rollouts = 100000;
  std::uint64_t eval_seed = 1;
  eval->add_option("--params", eval_params, "generator params json")->required();
  eval->add_option("--policy", eval_policy, "policy json")->required();
  eval->add_option("--rollouts", eval_rollouts, "rollout count");
  eval->add_option("--seed", eval_seed, "rollout seed");
  eval->add_option("--out", eval_out, "output values csv");

  // select
  auto* sel = app.add_subcommand("select", "held-out model selection across families");
  std::string sel_data, sel_out = "selection.csv";
  double sel_frac = 0.8;
  std::uint64_t sel_seed = 1;
  FitFlags sel_flags;
  sel->add_option("--data", sel_data, "dataset csv")->required();
  sel->add_option("--train-frac", sel_frac, "training fraction");
  sel->add_option("--seed", sel_seed, "split / fit seed");
  sel->add_option("--out", sel_out, "output selection csv");
  sel_flags.attach(sel);

  // experiment
  auto* exp = app.add_subcommand("experiment", "full seed-loop study");
  std::string exp_model = "best", exp_profile = "full", exp_out = "experiment";
  int exp_seeds = 0, exp_rollouts = 0;
  std::uint64_t exp_first_seed = 1;
  std::vector<int> exp_n_list;
  FitFlags exp_flags;
  exp_flags.n_sim = 0;  // profile default unless overridden
  exp->add_option("--model", exp_model, "best | best-ablation | catie");
  exp->add_option("--profile", exp_profile, "full | fast");
  exp->add_option("--seeds", exp_seeds, "number of seeds");
  exp->add_option("--first-seed", exp_first_seed, "first world seed");
  exp->add_option("--n", exp_n_list, "sample sizes (repeat for an MAE curve)");
  exp->add_option("--rollouts", exp_rollouts, "rollout count per policy");
  exp->add_option("--out", exp_out, "output directory");
  exp_flags.attach(exp);

  for (auto* cmd : {sim, fit, post, dtr, eval, sel, exp})
    cmd->add_option("--config", config_path, "JSON config file; explicit flags win");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty())
      merge_config_file(app.get_subcommands().front(), config_path);
    if (threads > 0) set_max_threads(threads);

    if (sim->parsed()) return cmd_simulate(sim_model, sim_n, sim_seed, sim_out);
    if (fit->parsed()) {
      if (fit_family.empty()) fit_family = fit_model == "catie" ? "luq" : "full";
      return cmd_fit(fit_data, fit_model, fit_family, fit_flags, fit_seed, fit_out);
    }
    if (post->parsed()) return cmd_posterior(post_data, post_fit, post_out);
    if (dtr->parsed())
      return cmd_dtr(dtr_data, dtr_fit, dtr_kind, dtr_trees, dtr_min_node, dtr_b2_bb, dtr_seed,
                     dtr_out);
    if (eval->parsed()) return cmd_evaluate(eval_params, eval_policy, eval_rollouts, eval_seed, eval_out);
    if (sel->parsed()) return cmd_select(sel_data, sel_frac, sel_flags, sel_seed, sel_out);
    if (exp->parsed())
      return cmd_experiment(exp_model, exp_profile, exp_seeds, exp_first_seed, exp_n_list,
                            exp_rollouts, exp_flags, exp_out);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace luq
