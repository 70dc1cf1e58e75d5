#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "luq/rng.hpp"

namespace luq {

// Single-decision schizophrenia-style world: two competing continuous
// outcomes, 10 binary preference questions, a Poisson satisfaction surrogate.
struct GenParamsCatie {
  Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(10);  // question intercepts
  Eigen::VectorXd beta1 = Eigen::VectorXd::Zero(10);  // question slopes on V
  // Outcome j linear model: Y_j = xstar . gamma_base[j] + A * (xstar . gamma_trt[j]) + eps
  // with xstar = (1, X). Fixed table chosen once so the two outcomes compete:
  // the treatment moves them in opposite directions.
  std::array<Eigen::Matrix<double, 6, 1>, 2> gamma_base;
  std::array<Eigen::Matrix<double, 6, 1>, 2> gamma_trt;
  double alpha0 = 0.0;
  double alpha1 = 1.0;
};

struct TrajectoryCatie {
  double v = 0.0;                                  // hidden
  Eigen::Vector2d e = Eigen::Vector2d::Constant(0.5);  // hidden, (Phi(V), 1-Phi(V))
  Eigen::Matrix<double, 5, 1> x = Eigen::Matrix<double, 5, 1>::Zero();
  std::array<int, 10> w{};
  int a = 0;  // 0/1
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  int b = 0;  // nonnegative satisfaction count
};

using CatieDataset = std::vector<TrajectoryCatie>;

// The fixed outcome coefficient table (documented generator config).
void catie_gamma_table(std::array<Eigen::Matrix<double, 6, 1>, 2>& base,
                       std::array<Eigen::Matrix<double, 6, 1>, 2>& trt);

// Draws beta from its prior, installs the fixed gamma table, and sets the
// satisfaction link from the realized utility range:
//   alpha1 = (max U - min U) / 6,   alpha0 = -alpha1 * min U.
GenParamsCatie draw_catie_params(Rng& rng, const std::vector<double>& realized_utilities);

// Simulation given complete params; deterministic in (params, n, seed).
// The satisfaction draw uses its own substream, so datasets simulated with
// differing alpha agree on every other field.
CatieDataset simulate_catie(const GenParamsCatie& params, int n, std::uint64_t seed);

double catie_mean_outcome(const GenParamsCatie& params, int j, const Eigen::Matrix<double, 5, 1>& x,
                          int a);
double catie_utility(const TrajectoryCatie& t);

// World construction for one experiment seed: draws params, simulates, and
// closes the loop between alpha and the realized utilities of the same
// dataset (two-pass with aligned streams).
struct CatieWorld {
  GenParamsCatie params;
  CatieDataset data;
};
CatieWorld make_catie_world(std::uint64_t seed, int n);

}  // namespace luq
