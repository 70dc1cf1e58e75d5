#pragma once

#include "json.hpp"
#include "luq/dtr.hpp"
#include "luq/fitter.hpp"

namespace luq {

nlohmann::json to_json(const BetaBinomModel& m);
BetaBinomModel betabinom_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BaggedTreesModel& m);
BaggedTreesModel trees_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LinearModel& m);
LinearModel linear_from_json(const nlohmann::json& j);

// Wall time is reported separately so fit payloads are byte-stable.
nlohmann::json fit_result_to_json(const FitResult& r, const std::string& model);
FitResult fit_result_from_json(const nlohmann::json& j, std::string* model = nullptr);

// Bundles embed their regression models and weight-source tag; the luq kind
// stores (family, theta, mc_seed, n_sim) and rebuilds its posterior engine.
nlohmann::json policy_to_json(const PolicyBundle& bundle);
PolicyBundle policy_from_json(const nlohmann::json& j);

}  // namespace luq
