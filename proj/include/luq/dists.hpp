#pragma once

#include <Eigen/Core>
#include <array>
#include <span>

namespace luq {

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

double sigmoid(double x);
double log_sigmoid(double x);  // -softplus(-x)
double softplus(double x);
double log_expm1(double x);    // log(e^x - 1), x > 0
double digamma(double x);
double log_choose(int n, int k);
double logsumexp(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Simplex embedding
// ---------------------------------------------------------------------------

// (exp(v_1),...,exp(v_{q-1}),1) / (1 + sum_i exp(v_i)). Output length q.
Eigen::VectorXd softmax_embed(const Eigen::VectorXd& v);

bool is_simplex(const Eigen::VectorXd& w, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Permutations of {1,2,3}
// ---------------------------------------------------------------------------

struct Permutation3 {
  // ranks[j] = rank given to outcome j (1 = most preferred)
  std::array<int, 3> ranks{1, 2, 3};

  bool valid() const;
  int index() const;  // position in all(), 0..5
  static Permutation3 from_index(int idx);
  static const std::array<Permutation3, 6>& all();
  bool operator==(const Permutation3&) const = default;
};

// Number of discordant pairs, in {0,1,2,3}.
int kendall_tau(const Permutation3& a, const Permutation3& b);

// Ranks of a weight vector, rank 1 = largest component; ties broken by
// ascending component index.
Permutation3 rank_permutation(std::span<const double> w);

// ---------------------------------------------------------------------------
// Probability mass functions (linear and log space)
// ---------------------------------------------------------------------------

// Mallows phi model over permutations of {1,2,3}. The normalizer uses the
// fixed distance multiset (0,1,1,2,2,3), which is the same for any center.
double mallows_log_normalizer(double lambda);
double mallows_mean_distance(double lambda);  // E[T] under the model
double mallows_log_pmf(const Permutation3& w, const Permutation3& center, double lambda);
double mallows_pmf(const Permutation3& w, const Permutation3& center, double lambda);

// Proportional-odds pmf with K = cutpoints.size()+1 levels, k in 1..K:
//   Pr(B <= k) = sigmoid(cutpoints[k-1] - alpha1 * eta)  for k < K.
double ordinal_log_pmf(int k, double eta, std::span<const double> cutpoints, double alpha1);
double ordinal_pmf(int k, double eta, std::span<const double> cutpoints, double alpha1);

// Bernoulli with logit-scale success parameter eta.
double bernoulli_logit_log_pmf(int w, double eta);
double bernoulli_logit_pmf(int w, double eta);

// Beta-binomial with mean mu in (0,1) and dispersion s > 0; shape parameters
// are (mu*s, (1-mu)*s). Approaches Binomial(n, mu) as s grows.
double betabinom_log_pmf(int y, int n, double mu, double s);
double betabinom_pmf(int y, int n, double mu, double s);

double poisson_log_pmf(int k, double log_mean);

}  // namespace luq
