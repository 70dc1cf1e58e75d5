#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "luq/best_model.hpp"
#include "luq/catie_model.hpp"

namespace luq {

// Shortest round-trip decimal form; CSV and JSON payloads must be
// byte-identical across reruns.
std::string format_double(double v);

// `provenance`, when non-empty, is written as a leading '#' comment line;
// readers skip such lines.
void write_best_csv(const std::string& path, const BestDataset& data,
                    const std::string& provenance = "");
BestDataset read_best_csv(const std::string& path);

void write_catie_csv(const std::string& path, const CatieDataset& data,
                     const std::string& provenance = "");
CatieDataset read_catie_csv(const std::string& path);

nlohmann::json to_json(const GenParamsBest& p);
GenParamsBest best_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GenParamsCatie& p);
GenParamsCatie catie_params_from_json(const nlohmann::json& j);

// Plain CSV assembly helpers shared by the report writers.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::string& provenance = "");
std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::vector<std::string>* header = nullptr);

}  // namespace luq
