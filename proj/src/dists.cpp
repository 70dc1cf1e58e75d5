#include "luq/dists.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace luq {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 33.0) return x;
  if (x < -33.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double log_sigmoid(double x) { return -softplus(-x); }

double log_expm1(double x) {
  if (x <= 0.0) throw std::invalid_argument("log_expm1: requires x > 0");
  if (x > 33.0) return x;
  return std::log(std::expm1(x));
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: requires x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // asymptotic expansion, error O(x^-10)
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

double log_choose(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_choose: k out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double logsumexp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

Eigen::VectorXd softmax_embed(const Eigen::VectorXd& v) {
  if (!v.allFinite()) throw std::invalid_argument("softmax_embed: non-finite input");
  const Eigen::Index q1 = v.size();
  Eigen::VectorXd out(q1 + 1);
  // shift by max(v, 0) so the fixed last coordinate is handled uniformly
  const double m = std::max(0.0, v.maxCoeff());
  double denom = std::exp(-m);
  for (Eigen::Index i = 0; i < q1; ++i) {
    out[i] = std::exp(v[i] - m);
    denom += out[i];
  }
  out[q1] = std::exp(-m);
  out /= denom;
  return out;
}

bool is_simplex(const Eigen::VectorXd& w, double tol) {
  if (w.size() == 0) return false;
  if ((w.array() < 0.0).any()) return false;
  return std::abs(w.sum() - 1.0) <= tol;
}

bool Permutation3::valid() const {
  std::array<bool, 3> seen{false, false, false};
  for (int r : ranks) {
    if (r < 1 || r > 3 || seen[r - 1]) return false;
    seen[r - 1] = true;
  }
  return true;
}

const std::array<Permutation3, 6>& Permutation3::all() {
  static const std::array<Permutation3, 6> perms = {
      Permutation3{{1, 2, 3}}, Permutation3{{1, 3, 2}}, Permutation3{{2, 1, 3}},
      Permutation3{{2, 3, 1}}, Permutation3{{3, 1, 2}}, Permutation3{{3, 2, 1}}};
  return perms;
}

int Permutation3::index() const {
  const auto& perms = all();
  for (int i = 0; i < 6; ++i)
    if (perms[i] == *this) return i;
  throw std::invalid_argument("Permutation3: not a permutation of {1,2,3}");
}

Permutation3 Permutation3::from_index(int idx) {
  if (idx < 0 || idx >= 6) throw std::invalid_argument("Permutation3: index out of range");
  return all()[idx];
}

int kendall_tau(const Permutation3& a, const Permutation3& b) {
  if (!a.valid() || !b.valid()) throw std::invalid_argument("kendall_tau: invalid permutation");
  int t = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if ((a.ranks[i] - a.ranks[j]) * (b.ranks[i] - b.ranks[j]) < 0) ++t;
  return t;
}

Permutation3 rank_permutation(std::span<const double> w) {
  if (w.size() != 3) throw std::invalid_argument("rank_permutation: needs 3 components");
  Permutation3 p;
  for (int j = 0; j < 3; ++j) {
    int rank = 1;
    for (int i = 0; i < 3; ++i) {
      if (i == j) continue;
      if (w[i] > w[j] || (w[i] == w[j] && i < j)) ++rank;
    }
    p.ranks[j] = rank;
  }
  return p;
}

double mallows_log_normalizer(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("mallows: negative lambda");
  const double e1 = std::exp(-lambda);
  const double e2 = std::exp(-2.0 * lambda);
  const double e3 = std::exp(-3.0 * lambda);
  return std::log(1.0 + 2.0 * e1 + 2.0 * e2 + e3);
}

double mallows_mean_distance(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("mallows: negative lambda");
  const double e1 = std::exp(-lambda);
  const double e2 = std::exp(-2.0 * lambda);
  const double e3 = std::exp(-3.0 * lambda);
  return (2.0 * e1 + 4.0 * e2 + 3.0 * e3) / (1.0 + 2.0 * e1 + 2.0 * e2 + e3);
}

double mallows_log_pmf(const Permutation3& w, const Permutation3& center, double lambda) {
  return -lambda * kendall_tau(w, center) - mallows_log_normalizer(lambda);
}

double mallows_pmf(const Permutation3& w, const Permutation3& center, double lambda) {
  return std::exp(mallows_log_pmf(w, center, lambda));
}

double ordinal_log_pmf(int k, double eta, std::span<const double> cutpoints, double alpha1) {
  const int levels = static_cast<int>(cutpoints.size()) + 1;
  if (levels < 2) throw std::invalid_argument("ordinal_log_pmf: needs at least one cutpoint");
  for (std::size_t i = 1; i < cutpoints.size(); ++i)
    if (!(cutpoints[i] > cutpoints[i - 1]))
      throw std::invalid_argument("ordinal_log_pmf: cutpoints must be strictly increasing");
  if (!(alpha1 > 0.0)) throw std::invalid_argument("ordinal_log_pmf: alpha1 must be positive");
  if (k < 1 || k > levels) throw std::invalid_argument("ordinal_log_pmf: level out of range");

  const double shift = alpha1 * eta;
  if (k == 1) return log_sigmoid(cutpoints[0] - shift);
  if (k == levels) return log_sigmoid(-(cutpoints[levels - 2] - shift));
  const double a = cutpoints[k - 1] - shift;
  const double b = cutpoints[k - 2] - shift;
  // log(sigmoid(a) - sigmoid(b)) without cancellation
  return b + log_expm1(a - b) - softplus(a) - softplus(b);
}

double ordinal_pmf(int k, double eta, std::span<const double> cutpoints, double alpha1) {
  return std::exp(ordinal_log_pmf(k, eta, cutpoints, alpha1));
}

double bernoulli_logit_log_pmf(int w, double eta) {
  if (w != 0 && w != 1) throw std::invalid_argument("bernoulli_logit_log_pmf: w not in {0,1}");
  return w == 1 ? log_sigmoid(eta) : log_sigmoid(-eta);
}

double bernoulli_logit_pmf(int w, double eta) {
  return std::exp(bernoulli_logit_log_pmf(w, eta));
}

double betabinom_log_pmf(int y, int n, double mu, double s) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("betabinom: mu must be in (0,1)");
  if (!(s > 0.0)) throw std::invalid_argument("betabinom: s must be positive");
  if (y < 0 || y > n) throw std::invalid_argument("betabinom: y out of range");
  const double a = mu * s;
  const double b = (1.0 - mu) * s;
  return log_choose(n, y) + std::lgamma(y + a) + std::lgamma(n - y + b) - std::lgamma(n + s) -
         std::lgamma(a) - std::lgamma(b) + std::lgamma(s);
}

double betabinom_pmf(int y, int n, double mu, double s) {
  return std::exp(betabinom_log_pmf(y, n, mu, s));
}

double poisson_log_pmf(int k, double log_mean) {
  if (k < 0) throw std::invalid_argument("poisson_log_pmf: negative count");
  return k * log_mean - std::exp(log_mean) - std::lgamma(k + 1.0);
}

}  // namespace luq
