#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "luq/dists.hpp"
#include "luq/rng.hpp"

namespace luq {

// Stage-2 treatment set: one treatment, or two taken simultaneously.
// Canonical form keeps first < second for pairs and second == 0 for
// singletons; canonical order is singletons ascending, then pairs
// lexicographic.
struct ActionSet {
  int first = 0;
  int second = 0;

  static ActionSet single(int a) { return {a, 0}; }
  static ActionSet pair(int a, int b);

  bool is_pair() const { return second != 0; }
  bool contains(int k) const { return first == k || second == k; }
  bool operator==(const ActionSet&) const = default;
  bool operator<(const ActionSet& o) const;
};

// Full parameter bundle for one simulated BEST world. theta = (beta, alpha,
// lambda) is the part the latent model fits; gamma drives the outcome arms
// and is never fitted. x2_mean/x2_sd are the standardization constants of
// the second-stage outcome model, estimated once per world from an
// auxiliary sample under the behavioral policy.
struct GenParamsBest {
  // beta[t][k] = (intercept, slope on V1, slope on V2); t timepoint, k question
  std::array<std::array<Eigen::Vector3d, 12>, 2> beta;
  std::array<double, 2> alpha_slope{};              // alpha_{1,t}
  std::array<std::array<double, 6>, 2> alpha_cut{}; // alpha_{0,k,t}, increasing in k
  std::array<double, 2> lambda{};
  // gamma0[k][j][t], gamma1[k][j][t]: treatment k in 0..3, outcome j in 0..2,
  // stage t in 0..1; gamma1 multiplies the standardized previous outcome
  std::array<std::array<std::array<double, 2>, 3>, 4> gamma0{};
  std::array<std::array<std::array<double, 2>, 3>, 4> gamma1{};
  Eigen::Vector3d x2_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d x2_sd = Eigen::Vector3d::Ones();
  bool ablated = false;
};

// One patient record. v and e are the hidden preference state, retained for
// oracle evaluation only.
struct TrajectoryBest {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  Eigen::Vector3d e = Eigen::Vector3d::Constant(1.0 / 3.0);
  std::array<int, 3> x1{};
  std::array<int, 12> w1{};
  Permutation3 w1r;
  int a1 = 1;
  int b1 = 1;
  std::array<int, 3> x2{};
  std::array<int, 12> w2{};
  Permutation3 w2r;
  int c = 1;
  ActionSet a2 = ActionSet::single(1);
  std::array<int, 3> y{};
  int b2 = 1;
};

using BestDataset = std::vector<TrajectoryBest>;

// Parameter priors (Appendix-style world draw). Also fills the cached
// standardization moments from an auxiliary behavioral sample.
GenParamsBest draw_best_params(Rng& rng);

// Competing-outcomes variant: second-stage treatment effects no longer
// depend on X2, outcome 1 becomes pure Bin(10, 1/2) noise and outcome 3's
// linear predictor is the negation of outcome 2's.
GenParamsBest apply_ablation(const GenParamsBest& params, Rng& rng);

// Stage-2 action sets allowed after first treatment a1 and response class c.
std::vector<ActionSet> feasible_actions(int a1, int c);

// Success probability of outcome j under second-stage treatment set a2.
double y_success_prob(const GenParamsBest& params, int j, const ActionSet& a2, int x2j);
double x2_success_prob(const GenParamsBest& params, int j, int a1, int x1j);

// Piecewise sampling, shared by the behavioral simulator and policy
// rollouts. The nature stream drives every outcome draw; treatment
// randomization consumes a separate stream so that rollouts under different
// policies see identical patients.
void sample_stage1(const GenParamsBest& params, TrajectoryBest& t, Rng& nature);
void sample_post_a1(const GenParamsBest& params, TrajectoryBest& t, Rng& nature);
void sample_post_a2(const GenParamsBest& params, TrajectoryBest& t, Rng& nature);

// Behavioral (SMART) simulation: deterministic given (params, n, seed).
BestDataset simulate_best(const GenParamsBest& params, int n, std::uint64_t seed);

// Behavioral treatment propensities (known by design).
double behavioral_prob_a1();
double behavioral_prob_a2(int a1, int c, const ActionSet& a2);

}  // namespace luq
