#include "luq/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace luq {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("csv: cannot parse number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("csv: cannot parse integer '" + s + "'");
  return v;
}

std::vector<std::string> best_header() {
  std::vector<std::string> h{"id"};
  for (int j = 1; j <= 3; ++j) h.push_back("x1_" + std::to_string(j));
  for (int k = 1; k <= 12; ++k) h.push_back("w1_" + std::to_string(k));
  for (int j = 1; j <= 3; ++j) h.push_back("w1r_" + std::to_string(j));
  h.push_back("a1");
  h.push_back("b1");
  for (int j = 1; j <= 3; ++j) h.push_back("x2_" + std::to_string(j));
  for (int k = 1; k <= 12; ++k) h.push_back("w2_" + std::to_string(k));
  for (int j = 1; j <= 3; ++j) h.push_back("w2r_" + std::to_string(j));
  h.push_back("c");
  h.push_back("a2_a");
  h.push_back("a2_b");
  for (int j = 1; j <= 3; ++j) h.push_back("y_" + std::to_string(j));
  h.push_back("b2");
  h.insert(h.end(), {"oracle_v1", "oracle_v2", "oracle_e1", "oracle_e2", "oracle_e3"});
  return h;
}

std::vector<std::string> catie_header() {
  std::vector<std::string> h{"id"};
  for (int j = 1; j <= 5; ++j) h.push_back("x_" + std::to_string(j));
  for (int k = 1; k <= 10; ++k) h.push_back("w_" + std::to_string(k));
  h.insert(h.end(), {"a", "y_1", "y_2", "b", "oracle_v", "oracle_e1", "oracle_e2"});
  return h;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows,
               const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv row width mismatch writing " + path);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::vector<std::string>* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  do {
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  } while (!line.empty() && line[0] == '#');
  if (header) *header = split_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_line(line));
  }
  return rows;
}

void write_best_csv(const std::string& path, const BestDataset& data,
                    const std::string& provenance) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.size());
  int id = 0;
  for (const TrajectoryBest& t : data) {
    std::vector<std::string> r;
    r.push_back(std::to_string(id++));
    for (int j = 0; j < 3; ++j) r.push_back(std::to_string(t.x1[j]));
    for (int k = 0; k < 12; ++k) r.push_back(std::to_string(t.w1[k]));
    for (int j = 0; j < 3; ++j) r.push_back(std::to_string(t.w1r.ranks[j]));
    r.push_back(std::to_string(t.a1));
    r.push_back(std::to_string(t.b1));
    for (int j = 0; j < 3; ++j) r.push_back(std::to_string(t.x2[j]));
    for (int k = 0; k < 12; ++k) r.push_back(std::to_string(t.w2[k]));
    for (int j = 0; j < 3; ++j) r.push_back(std::to_string(t.w2r.ranks[j]));
    r.push_back(std::to_string(t.c));
    r.push_back(std::to_string(t.a2.first));
    r.push_back(std::to_string(t.a2.second));
    for (int j = 0; j < 3; ++j) r.push_back(std::to_string(t.y[j]));
    r.push_back(std::to_string(t.b2));
    r.push_back(format_double(t.v[0]));
    r.push_back(format_double(t.v[1]));
    for (int j = 0; j < 3; ++j) r.push_back(format_double(t.e[j]));
    rows.push_back(std::move(r));
  }
  write_csv(path, best_header(), rows, provenance);
}

BestDataset read_best_csv(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header != best_header())
    throw std::runtime_error("unexpected BEST dataset header in " + path);
  BestDataset data;
  data.reserve(rows.size());
  for (const auto& r : rows) {
    TrajectoryBest t;
    int i = 1;
    for (int j = 0; j < 3; ++j) t.x1[j] = parse_int(r[i++]);
    for (int k = 0; k < 12; ++k) t.w1[k] = parse_int(r[i++]);
    for (int j = 0; j < 3; ++j) t.w1r.ranks[j] = parse_int(r[i++]);
    t.a1 = parse_int(r[i++]);
    t.b1 = parse_int(r[i++]);
    for (int j = 0; j < 3; ++j) t.x2[j] = parse_int(r[i++]);
    for (int k = 0; k < 12; ++k) t.w2[k] = parse_int(r[i++]);
    for (int j = 0; j < 3; ++j) t.w2r.ranks[j] = parse_int(r[i++]);
    t.c = parse_int(r[i++]);
    const int a2a = parse_int(r[i++]);
    const int a2b = parse_int(r[i++]);
    t.a2 = a2b == 0 ? ActionSet::single(a2a) : ActionSet::pair(a2a, a2b);
    for (int j = 0; j < 3; ++j) t.y[j] = parse_int(r[i++]);
    t.b2 = parse_int(r[i++]);
    t.v[0] = parse_double(r[i++]);
    t.v[1] = parse_double(r[i++]);
    for (int j = 0; j < 3; ++j) t.e[j] = parse_double(r[i++]);
    data.push_back(t);
  }
  return data;
}

void write_catie_csv(const std::string& path, const CatieDataset& data,
                     const std::string& provenance) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.size());
  int id = 0;
  for (const TrajectoryCatie& t : data) {
    std::vector<std::string> r;
    r.push_back(std::to_string(id++));
    for (int j = 0; j < 5; ++j) r.push_back(format_double(t.x[j]));
    for (int k = 0; k < 10; ++k) r.push_back(std::to_string(t.w[k]));
    r.push_back(std::to_string(t.a));
    r.push_back(format_double(t.y[0]));
    r.push_back(format_double(t.y[1]));
    r.push_back(std::to_string(t.b));
    r.push_back(format_double(t.v));
    r.push_back(format_double(t.e[0]));
    r.push_back(format_double(t.e[1]));
    rows.push_back(std::move(r));
  }
  write_csv(path, catie_header(), rows, provenance);
}

CatieDataset read_catie_csv(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header != catie_header())
    throw std::runtime_error("unexpected CATIE dataset header in " + path);
  CatieDataset data;
  data.reserve(rows.size());
  for (const auto& r : rows) {
    TrajectoryCatie t;
    int i = 1;
    for (int j = 0; j < 5; ++j) t.x[j] = parse_double(r[i++]);
    for (int k = 0; k < 10; ++k) t.w[k] = parse_int(r[i++]);
    t.a = parse_int(r[i++]);
    t.y[0] = parse_double(r[i++]);
    t.y[1] = parse_double(r[i++]);
    t.b = parse_int(r[i++]);
    t.v = parse_double(r[i++]);
    t.e[0] = parse_double(r[i++]);
    t.e[1] = parse_double(r[i++]);
    data.push_back(t);
  }
  return data;
}

nlohmann::json to_json(const GenParamsBest& p) {
  nlohmann::json j;
  for (int t = 0; t < 2; ++t) {
    nlohmann::json betas = nlohmann::json::array();
    for (int k = 0; k < 12; ++k)
      betas.push_back({p.beta[t][k][0], p.beta[t][k][1], p.beta[t][k][2]});
    j["beta"][t] = betas;
    j["alpha_slope"][t] = p.alpha_slope[t];
    j["alpha_cut"][t] = p.alpha_cut[t];
    j["lambda"][t] = p.lambda[t];
  }
  for (int k = 0; k < 4; ++k)
    for (int jj = 0; jj < 3; ++jj)
      for (int t = 0; t < 2; ++t) {
        j["gamma0"][k][jj][t] = p.gamma0[k][jj][t];
        j["gamma1"][k][jj][t] = p.gamma1[k][jj][t];
      }
  j["x2_mean"] = {p.x2_mean[0], p.x2_mean[1], p.x2_mean[2]};
  j["x2_sd"] = {p.x2_sd[0], p.x2_sd[1], p.x2_sd[2]};
  j["ablated"] = p.ablated;
  j["model"] = "best";
  return j;
}

GenParamsBest best_params_from_json(const nlohmann::json& j) {
  GenParamsBest p;
  for (int t = 0; t < 2; ++t) {
    for (int k = 0; k < 12; ++k)
      for (int c = 0; c < 3; ++c) p.beta[t][k][c] = j.at("beta").at(t).at(k).at(c).get<double>();
    p.alpha_slope[t] = j.at("alpha_slope").at(t).get<double>();
    for (int k = 0; k < 6; ++k) p.alpha_cut[t][k] = j.at("alpha_cut").at(t).at(k).get<double>();
    p.lambda[t] = j.at("lambda").at(t).get<double>();
  }
  for (int k = 0; k < 4; ++k)
    for (int jj = 0; jj < 3; ++jj)
      for (int t = 0; t < 2; ++t) {
        p.gamma0[k][jj][t] = j.at("gamma0").at(k).at(jj).at(t).get<double>();
        p.gamma1[k][jj][t] = j.at("gamma1").at(k).at(jj).at(t).get<double>();
      }
  for (int jj = 0; jj < 3; ++jj) {
    p.x2_mean[jj] = j.at("x2_mean").at(jj).get<double>();
    p.x2_sd[jj] = j.at("x2_sd").at(jj).get<double>();
  }
  p.ablated = j.at("ablated").get<bool>();
  return p;
}

nlohmann::json to_json(const GenParamsCatie& p) {
  nlohmann::json j;
  j["model"] = "catie";
  j["beta0"] = std::vector<double>(p.beta0.data(), p.beta0.data() + p.beta0.size());
  j["beta1"] = std::vector<double>(p.beta1.data(), p.beta1.data() + p.beta1.size());
  for (int o = 0; o < 2; ++o) {
    j["gamma_base"][o] =
        std::vector<double>(p.gamma_base[o].data(), p.gamma_base[o].data() + 6);
    j["gamma_trt"][o] = std::vector<double>(p.gamma_trt[o].data(), p.gamma_trt[o].data() + 6);
  }
  j["alpha0"] = p.alpha0;
  j["alpha1"] = p.alpha1;
  return j;
}

GenParamsCatie catie_params_from_json(const nlohmann::json& j) {
  GenParamsCatie p;
  for (int q = 0; q < 10; ++q) {
    p.beta0[q] = j.at("beta0").at(q).get<double>();
    p.beta1[q] = j.at("beta1").at(q).get<double>();
  }
  for (int o = 0; o < 2; ++o)
    for (int k = 0; k < 6; ++k) {
      p.gamma_base[o][k] = j.at("gamma_base").at(o).at(k).get<double>();
      p.gamma_trt[o][k] = j.at("gamma_trt").at(o).at(k).get<double>();
    }
  p.alpha0 = j.at("alpha0").get<double>();
  p.alpha1 = j.at("alpha1").get<double>();
  return p;
}

}  // namespace luq
