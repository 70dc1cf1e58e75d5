#include "luq/catie_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "luq/dists.hpp"
#include "luq/parallel.hpp"

namespace luq {

namespace {
double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Poisson with arbitrary mean via additivity of small-mean blocks.
int sample_poisson(Rng& rng, double mean) {
  int total = 0;
  while (mean > 30.0) {
    total += rng.poisson(30.0);
    mean -= 30.0;
  }
  return total + rng.poisson(mean);
}
}  // namespace

void catie_gamma_table(std::array<Eigen::Matrix<double, 6, 1>, 2>& base,
                       std::array<Eigen::Matrix<double, 6, 1>, 2>& trt) {
  base[0] << 0.5, 0.4, -0.3, 0.3, -0.2, 0.2;
  base[1] << 0.5, -0.4, 0.3, -0.3, 0.2, 0.2;
  trt[0] << 0.6, 0.5, 0.5, -0.4, 0.3, -0.3;
  trt[1] = -trt[0];  // opposed treatment effects make the outcomes compete
}

GenParamsCatie draw_catie_params(Rng& rng, const std::vector<double>& realized_utilities) {
  if (realized_utilities.empty())
    throw std::invalid_argument("draw_catie_params: empty utility vector");
  const auto [lo, hi] =
      std::minmax_element(realized_utilities.begin(), realized_utilities.end());
  if (!(*hi > *lo)) throw std::invalid_argument("draw_catie_params: degenerate utility range");

  GenParamsCatie p;
  for (int j = 0; j < 10; ++j) {
    p.beta0[j] = 0.0;
    p.beta1[j] = rng.normal();
  }
  catie_gamma_table(p.gamma_base, p.gamma_trt);
  p.alpha1 = (*hi - *lo) / 6.0;
  p.alpha0 = -p.alpha1 * *lo;
  return p;
}

double catie_mean_outcome(const GenParamsCatie& params, int j,
                          const Eigen::Matrix<double, 5, 1>& x, int a) {
  Eigen::Matrix<double, 6, 1> xstar;
  xstar << 1.0, x;
  return xstar.dot(params.gamma_base[j]) + (a != 0 ? xstar.dot(params.gamma_trt[j]) : 0.0);
}

double catie_utility(const TrajectoryCatie& t) { return t.e.dot(t.y); }

CatieDataset simulate_catie(const GenParamsCatie& params, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_catie: n must be >= 1");
  CatieDataset data(n);
  const Rng root(seed);
  parallel_blocks(static_cast<std::size_t>(n), 256, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Rng stream = root.substream(i);
      Rng nature = stream.substream(0);
      Rng assign = stream.substream(1);
      Rng satisf = stream.substream(2);
      TrajectoryCatie& t = data[i];
      t.v = nature.normal();
      t.e << phi_cdf(t.v), 1.0 - phi_cdf(t.v);
      for (int j = 0; j < 5; ++j) t.x[j] = nature.normal();
      for (int j = 0; j < 10; ++j)
        t.w[j] = nature.bernoulli(sigmoid(params.beta0[j] + params.beta1[j] * t.v)) ? 1 : 0;
      t.a = assign.bernoulli(0.5) ? 1 : 0;
      for (int j = 0; j < 2; ++j)
        t.y[j] = catie_mean_outcome(params, j, t.x, t.a) + nature.normal();
      const double u = catie_utility(t);
      t.b = sample_poisson(satisf, std::exp(params.alpha0 + params.alpha1 * u));
    }
  });
  return data;
}

CatieWorld make_catie_world(std::uint64_t seed, int n) {
  // Pass 1: simulate with placeholder alpha to realize the utilities; the
  // satisfaction stream is separate, so only B differs between passes.
  Rng prng(Rng(seed).substream(11).next_u64());
  Rng probe = prng;  // identical state, consumed by the probe draw
  GenParamsCatie probe_params = draw_catie_params(probe, {0.0, 1.0});
  const std::uint64_t data_seed = Rng(seed).substream(12).next_u64();
  CatieDataset pass1 = simulate_catie(probe_params, n, data_seed);
  std::vector<double> utilities(pass1.size());
  for (std::size_t i = 0; i < pass1.size(); ++i) utilities[i] = catie_utility(pass1[i]);

  CatieWorld world;
  world.params = draw_catie_params(prng, utilities);
  world.data = simulate_catie(world.params, n, data_seed);
  return world;
}

}  // namespace luq
