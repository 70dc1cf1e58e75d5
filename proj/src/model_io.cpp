#include "luq/model_io.hpp"

#include <stdexcept>

namespace luq {

namespace {
std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}
Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace

nlohmann::json to_json(const BetaBinomModel& m) {
  return {{"coef", to_vec(m.coef)},
          {"log_s", m.log_s},
          {"n_trials", m.n_trials},
          {"converged", m.converged},
          {"fallback_binomial", m.fallback_binomial}};
}

BetaBinomModel betabinom_from_json(const nlohmann::json& j) {
  BetaBinomModel m;
  m.coef = from_vec(j.at("coef").get<std::vector<double>>());
  m.log_s = j.at("log_s").get<double>();
  m.n_trials = j.at("n_trials").get<int>();
  m.converged = j.at("converged").get<bool>();
  m.fallback_binomial = j.at("fallback_binomial").get<bool>();
  return m;
}

nlohmann::json to_json(const BaggedTreesModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  return {{"n_trees", m.config.n_trees},
          {"min_node_size", m.config.min_node_size},
          {"seed", m.config.seed},
          {"trees", std::move(trees)}};
}

BaggedTreesModel trees_from_json(const nlohmann::json& j) {
  BaggedTreesModel m;
  m.config.n_trees = j.at("n_trees").get<int>();
  m.config.min_node_size = j.at("min_node_size").get<int>();
  m.config.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& tj : j.at("trees")) {
    RegressionTree t;
    for (const auto& nj : tj) {
      TreeNode n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.value = nj.at(4).get<double>();
      t.nodes.push_back(n);
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

nlohmann::json to_json(const LinearModel& m) { return {{"coef", to_vec(m.coef)}}; }

LinearModel linear_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.coef = from_vec(j.at("coef").get<std::vector<double>>());
  return m;
}

nlohmann::json fit_result_to_json(const FitResult& r, const std::string& model) {
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"start", s.start_index},
                      {"initial_value", s.initial_value},
                      {"warmup_value", s.warmup_value},
                      {"final_value", s.final_value},
                      {"grad_inf_norm", s.grad_inf_norm},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  return {{"model", model},
          {"family", r.family_id},
          {"theta", to_vec(r.theta)},
          {"loglik", r.loglik},
          {"penalized", r.penalized},
          {"grad_inf_norm", r.grad_inf_norm},
          {"converged", r.converged},
          {"best_start", r.best_start},
          {"mc_seed", r.mc_seed},
          {"n_sim", r.n_sim},
          {"starts", std::move(starts)}};
}

FitResult fit_result_from_json(const nlohmann::json& j, std::string* model) {
  FitResult r;
  if (model) *model = j.at("model").get<std::string>();
  r.family_id = j.at("family").get<std::string>();
  r.theta = from_vec(j.at("theta").get<std::vector<double>>());
  r.loglik = j.at("loglik").get<double>();
  r.penalized = j.at("penalized").get<double>();
  r.grad_inf_norm = j.at("grad_inf_norm").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.best_start = j.at("best_start").get<int>();
  r.mc_seed = j.at("mc_seed").get<std::uint64_t>();
  r.n_sim = j.at("n_sim").get<int>();
  for (const auto& sj : j.at("starts")) {
    StartRecord s;
    s.start_index = sj.at("start").get<int>();
    s.initial_value = sj.at("initial_value").get<double>();
    s.warmup_value = sj.at("warmup_value").get<double>();
    s.final_value = sj.at("final_value").get<double>();
    s.grad_inf_norm = sj.at("grad_inf_norm").get<double>();
    s.iterations = sj.at("iterations").get<int>();
    s.converged = sj.at("converged").get<bool>();
    r.starts.push_back(s);
  }
  return r;
}

nlohmann::json policy_to_json(const PolicyBundle& bundle) {
  nlohmann::json j;
  j["kind"] = to_string(bundle.kind);
  j["b2_uses_trees"] = bundle.b2_uses_trees;
  if (bundle.has_outcome_models) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : bundle.outcome_models) models.push_back(to_json(m));
    j["outcome_models"] = std::move(models);
  }
  if (bundle.has_b2_model) j["b2_model"] = to_json(bundle.b2_model);
  if (!bundle.b2_uses_trees && bundle.kind == PolicyKind::b2)
    j["b2_bb_model"] = to_json(bundle.b2_bb_model);
  if (bundle.has_stage1) j["stage1_model"] = to_json(bundle.stage1_model);
  if (bundle.posterior) {
    j["weight_source"] = {{"family", bundle.posterior->family().id()},
                          {"theta", to_vec(bundle.posterior->theta())},
                          {"mc_seed", bundle.posterior->draws().seed_tag},
                          {"n_sim", bundle.posterior->draws().count()}};
  }
  return j;
}

PolicyBundle policy_from_json(const nlohmann::json& j) {
  PolicyBundle bundle;
  bundle.kind = policy_kind_from_string(j.at("kind").get<std::string>());
  bundle.b2_uses_trees = j.at("b2_uses_trees").get<bool>();
  if (j.contains("outcome_models")) {
    int i = 0;
    for (const auto& mj : j.at("outcome_models")) bundle.outcome_models[i++] = betabinom_from_json(mj);
    bundle.has_outcome_models = true;
  }
  if (j.contains("b2_model")) {
    bundle.b2_model = trees_from_json(j.at("b2_model"));
    bundle.has_b2_model = true;
  }
  if (j.contains("b2_bb_model")) bundle.b2_bb_model = betabinom_from_json(j.at("b2_bb_model"));
  if (j.contains("stage1_model")) {
    bundle.stage1_model = trees_from_json(j.at("stage1_model"));
    bundle.has_stage1 = true;
  }
  if (j.contains("weight_source")) {
    const auto& ws = j.at("weight_source");
    const BestFamily family = BestFamily::from_id(ws.at("family").get<std::string>());
    const Eigen::VectorXd theta = from_vec(ws.at("theta").get<std::vector<double>>());
    const McDraws draws = McDraws::standard_normal(ws.at("n_sim").get<int>(), 2,
                                                   ws.at("mc_seed").get<std::uint64_t>());
    bundle.posterior = std::make_shared<const BestPosteriorEngine>(theta, family, draws);
  }
  return bundle;
}

}  // namespace luq
