#include "luq/best_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "luq/parallel.hpp"

namespace luq {

namespace {
constexpr int kAuxMomentSample = 100000;

void check_treatment(int a) {
  if (a < 1 || a > 4) throw std::invalid_argument("treatment code out of range 1..4");
}
void check_class(int c) {
  if (c < 1 || c > 4) throw std::invalid_argument("response class out of range 1..4");
}
}  // namespace

ActionSet ActionSet::pair(int a, int b) {
  if (a == b) throw std::invalid_argument("ActionSet::pair: equal treatments");
  return {std::min(a, b), std::max(a, b)};
}

bool ActionSet::operator<(const ActionSet& o) const {
  if (is_pair() != o.is_pair()) return !is_pair();
  if (first != o.first) return first < o.first;
  return second < o.second;
}

std::vector<ActionSet> feasible_actions(int a1, int c) {
  check_treatment(a1);
  check_class(c);
  std::vector<ActionSet> augment;
  std::vector<ActionSet> switches;
  for (int a = 1; a <= 4; ++a) {
    if (a == a1) continue;
    augment.push_back(ActionSet::pair(a1, a));
    switches.push_back(ActionSet::single(a));
  }
  std::vector<ActionSet> out;
  if (c == 1) {
    out.push_back(ActionSet::single(a1));
  } else if (c == 2 || a1 == 1) {
    out = augment;  // A1 = 1 always augments instead of switching
  } else if (c == 3) {
    out = switches;
    out.insert(out.end(), augment.begin(), augment.end());
  } else {
    out = switches;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double behavioral_prob_a1() { return 0.25; }

double behavioral_prob_a2(int a1, int c, const ActionSet& a2) {
  const auto feasible = feasible_actions(a1, c);
  if (std::find(feasible.begin(), feasible.end(), a2) == feasible.end()) return 0.0;
  return 1.0 / static_cast<double>(feasible.size());
}

double x2_success_prob(const GenParamsBest& params, int j, int a1, int x1j) {
  // X1_j ~ Bin(10, 1/2): exact moments 5 and 2.5
  const double std_x1 = (x1j - 5.0) / std::sqrt(2.5);
  const int k = a1 - 1;
  return sigmoid(params.gamma0[k][j][0] + std_x1 * params.gamma1[k][j][0]);
}

double y_success_prob(const GenParamsBest& params, int j, const ActionSet& a2, int x2j) {
  const double std_x2 = (x2j - params.x2_mean[j]) / params.x2_sd[j];
  double eta = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (!a2.contains(k + 1)) continue;
    eta += params.gamma0[k][j][1] + std_x2 * params.gamma1[k][j][1];
  }
  return sigmoid(eta);
}

namespace {

int sample_ordinal(Rng& rng, double eta, const std::array<double, 6>& cuts, double slope) {
  std::array<double, 7> probs;
  for (int k = 1; k <= 7; ++k)
    probs[k - 1] = ordinal_pmf(k, eta, std::span<const double>(cuts.data(), 6), slope);
  return 1 + rng.categorical(probs);
}

Permutation3 sample_mallows(Rng& rng, const Permutation3& center, double lambda) {
  std::array<double, 6> probs;
  for (int i = 0; i < 6; ++i)
    probs[i] = mallows_pmf(Permutation3::from_index(i), center, lambda);
  return Permutation3::from_index(rng.categorical(probs));
}

// Moments of X2_j under A1 ~ Uniform{1..4}, X1_j ~ Bin(10, 1/2).
void fill_x2_moments(GenParamsBest& params, Rng& rng) {
  for (int j = 0; j < 3; ++j) {
    double sum = 0.0, sumsq = 0.0;
    Rng aux = rng.substream(7000 + j);
    for (int i = 0; i < kAuxMomentSample; ++i) {
      const int a1 = aux.uniform_int(1, 4);
      const int x1 = aux.binomial(10, 0.5);
      const int x2 = aux.binomial(10, x2_success_prob(params, j, a1, x1));
      sum += x2;
      sumsq += static_cast<double>(x2) * x2;
    }
    const double mean = sum / kAuxMomentSample;
    const double var = sumsq / kAuxMomentSample - mean * mean;
    params.x2_mean[j] = mean;
    params.x2_sd[j] = std::sqrt(std::max(var, 1e-12));
  }
}

}  // namespace

GenParamsBest draw_best_params(Rng& rng) {
  GenParamsBest p;
  for (int k = 0; k < 12; ++k) {
    const Eigen::Vector2d b1(rng.normal(), rng.normal());
    const Eigen::Vector2d eps(rng.normal(), rng.normal());
    const Eigen::Vector2d b2 = std::sqrt(0.8) * b1 + std::sqrt(0.2) * eps;
    p.beta[0][k] << 0.0, b1[0], b1[1];
    p.beta[1][k] << 0.0, b2[0], b2[1];
  }
  p.alpha_slope = {0.5, 0.6};
  for (int k = 0; k < 6; ++k) {
    p.alpha_cut[0][k] = 0.75 * (k + 1);
    p.alpha_cut[1][k] = p.alpha_cut[0][k] + 0.5;
  }
  p.lambda = {0.5, 2.0};
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 3; ++j) {
      const double g0 = 0.5 * rng.normal();
      const double g1 = rng.normal();
      p.gamma0[k][j][0] = g0;
      p.gamma1[k][j][0] = g1;
      p.gamma0[k][j][1] = std::sqrt(0.8) * g0 + std::sqrt(0.2) * 0.5 * rng.normal();
      p.gamma1[k][j][1] = std::sqrt(0.8) * g1 + std::sqrt(0.2) * rng.normal();
    }
  }
  fill_x2_moments(p, rng);
  return p;
}

GenParamsBest apply_ablation(const GenParamsBest& params, Rng& rng) {
  GenParamsBest p = params;
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 3; ++j) p.gamma1[k][j][1] = 0.0;
    p.gamma0[k][0][1] = 0.0;                 // outcome 1 becomes Bin(10, 1/2)
    p.gamma0[k][1][1] = rng.normal();        // redrawn from N(0,1) for larger effects
  }
  for (int k = 0; k < 4; ++k) p.gamma0[k][2][1] = -p.gamma0[k][1][1];
  p.ablated = true;
  return p;
}

void sample_stage1(const GenParamsBest& params, TrajectoryBest& t, Rng& nature) {
  t.v << nature.normal(), nature.normal();
  Eigen::VectorXd e = softmax_embed(t.v);
  t.e = e;
  const Eigen::Vector3d vstar(1.0, t.v[0], t.v[1]);
  for (int k = 0; k < 12; ++k)
    t.w1[k] = nature.bernoulli(sigmoid(params.beta[0][k].dot(vstar))) ? 1 : 0;
  const Permutation3 center = rank_permutation(std::span<const double>(t.e.data(), 3));
  t.w1r = sample_mallows(nature, center, params.lambda[0]);
  for (int j = 0; j < 3; ++j) t.x1[j] = nature.binomial(10, 0.5);
}

void sample_post_a1(const GenParamsBest& params, TrajectoryBest& t, Rng& nature) {
  const Eigen::Vector3d vstar(1.0, t.v[0], t.v[1]);
  for (int k = 0; k < 12; ++k)
    t.w2[k] = nature.bernoulli(sigmoid(params.beta[1][k].dot(vstar))) ? 1 : 0;
  const Permutation3 center = rank_permutation(std::span<const double>(t.e.data(), 3));
  t.w2r = sample_mallows(nature, center, params.lambda[1]);
  for (int j = 0; j < 3; ++j)
    t.x2[j] = nature.binomial(10, x2_success_prob(params, j, t.a1, t.x1[j]));
  const double eta1 = t.e.dot(Eigen::Vector3d(t.x2[0], t.x2[1], t.x2[2]));
  t.b1 = sample_ordinal(nature, eta1, params.alpha_cut[0], params.alpha_slope[0]);
}

void sample_post_a2(const GenParamsBest& params, TrajectoryBest& t, Rng& nature) {
  for (int j = 0; j < 3; ++j)
    t.y[j] = nature.binomial(10, y_success_prob(params, j, t.a2, t.x2[j]));
  const double eta2 = t.e.dot(Eigen::Vector3d(t.y[0], t.y[1], t.y[2]));
  t.b2 = sample_ordinal(nature, eta2, params.alpha_cut[1], params.alpha_slope[1]);
}

BestDataset simulate_best(const GenParamsBest& params, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_best: n must be >= 1");
  BestDataset data(n);
  const Rng root(seed);
  parallel_blocks(static_cast<std::size_t>(n), 64, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Rng stream = root.substream(i);
      Rng nature = stream.substream(0);
      Rng assign = stream.substream(1);
      Rng chance = stream.substream(2);
      TrajectoryBest& t = data[i];
      sample_stage1(params, t, nature);
      t.a1 = assign.uniform_int(1, 4);
      sample_post_a1(params, t, nature);
      t.c = chance.uniform_int(1, 4);
      const auto feasible = feasible_actions(t.a1, t.c);
      t.a2 = feasible[assign.uniform_int(0, static_cast<int>(feasible.size()) - 1)];
      sample_post_a2(params, t, nature);
    }
  });
  return data;
}

}  // namespace luq
