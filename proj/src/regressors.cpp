#include "luq/regressors.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "luq/dists.hpp"
#include "luq/fitter.hpp"
#include "luq/parallel.hpp"

namespace luq {

// ---------------------------------------------------------------------------
// Design rows
// ---------------------------------------------------------------------------

Eigen::VectorXd best_stage2_design(const TrajectoryBest& t, const ActionSet& a2) {
  Eigen::VectorXd x(20);
  x[0] = 1.0;
  for (int j = 0; j < 3; ++j) x[1 + j] = t.x2[j];
  for (int k = 0; k < 4; ++k) x[4 + k] = a2.contains(k + 1) ? 1.0 : 0.0;
  int idx = 8;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 4; ++k) x[idx++] = t.x2[j] * (a2.contains(k + 1) ? 1.0 : 0.0);
  return x;
}

std::vector<std::string> best_stage2_design_names() {
  std::vector<std::string> names{"intercept", "x2_1", "x2_2", "x2_3",
                                 "a2_1",      "a2_2", "a2_3", "a2_4"};
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 4; ++k) names.push_back("x2_" + std::to_string(j) + ":a2_" + std::to_string(k));
  return names;
}

Eigen::VectorXd best_stage1_features(const TrajectoryBest& t, int a1) {
  Eigen::VectorXd x(22);
  for (int j = 0; j < 3; ++j) x[j] = t.x1[j];
  for (int k = 0; k < 12; ++k) x[3 + k] = t.w1[k];
  for (int j = 0; j < 3; ++j) x[15 + j] = t.w1r.ranks[j];
  for (int k = 0; k < 4; ++k) x[18 + k] = (a1 == k + 1) ? 1.0 : 0.0;
  return x;
}

std::vector<std::string> best_stage1_feature_names() {
  std::vector<std::string> names;
  for (int j = 1; j <= 3; ++j) names.push_back("x1_" + std::to_string(j));
  for (int k = 1; k <= 12; ++k) names.push_back("w1_" + std::to_string(k));
  for (int j = 1; j <= 3; ++j) names.push_back("w1r_" + std::to_string(j));
  for (int k = 1; k <= 4; ++k) names.push_back("a1_" + std::to_string(k));
  return names;
}

Eigen::VectorXd best_h2_features(const TrajectoryBest& t, const ActionSet& a2) {
  Eigen::VectorXd x(45);
  int i = 0;
  for (int j = 0; j < 3; ++j) x[i++] = t.x1[j];
  for (int k = 0; k < 12; ++k) x[i++] = t.w1[k];
  for (int j = 0; j < 3; ++j) x[i++] = t.w1r.ranks[j];
  for (int k = 0; k < 4; ++k) x[i++] = (t.a1 == k + 1) ? 1.0 : 0.0;
  x[i++] = t.b1;
  for (int j = 0; j < 3; ++j) x[i++] = t.x2[j];
  for (int k = 0; k < 12; ++k) x[i++] = t.w2[k];
  for (int j = 0; j < 3; ++j) x[i++] = t.w2r.ranks[j];
  for (int k = 0; k < 4; ++k) x[i++] = a2.contains(k + 1) ? 1.0 : 0.0;
  return x;
}

std::vector<std::string> best_h2_feature_names() {
  std::vector<std::string> names = best_stage1_feature_names();
  names.push_back("b1");
  for (int j = 1; j <= 3; ++j) names.push_back("x2_" + std::to_string(j));
  for (int k = 1; k <= 12; ++k) names.push_back("w2_" + std::to_string(k));
  for (int j = 1; j <= 3; ++j) names.push_back("w2r_" + std::to_string(j));
  for (int k = 1; k <= 4; ++k) names.push_back("a2_" + std::to_string(k));
  return names;
}

Eigen::VectorXd catie_design(const TrajectoryCatie& t, int a) {
  Eigen::VectorXd x(12);
  x[0] = 1.0;
  for (int j = 0; j < 5; ++j) x[1 + j] = t.x[j];
  x[6] = a;
  for (int j = 0; j < 5; ++j) x[7 + j] = a * t.x[j];
  return x;
}

std::vector<std::string> catie_design_names() {
  std::vector<std::string> names{"intercept"};
  for (int j = 1; j <= 5; ++j) names.push_back("x_" + std::to_string(j));
  names.push_back("a");
  for (int j = 1; j <= 5; ++j) names.push_back("a:x_" + std::to_string(j));
  return names;
}

// ---------------------------------------------------------------------------
// Beta-binomial regression
// ---------------------------------------------------------------------------

double BetaBinomModel::predict_mu(const Eigen::VectorXd& x) const { return sigmoid(coef.dot(x)); }
double BetaBinomModel::predict_mean(const Eigen::VectorXd& x) const {
  return n_trials * predict_mu(x);
}

double betabinom_loglik(const std::vector<int>& y, const Eigen::MatrixXd& X, int n_trials,
                        const Eigen::VectorXd& coef, double log_s, Eigen::VectorXd* grad) {
  const int n = static_cast<int>(y.size());
  if (X.rows() != n) throw std::invalid_argument("betabinom_loglik: size mismatch");
  const double s = std::exp(log_s);
  if (!std::isfinite(s) || s <= 0.0) return -std::numeric_limits<double>::infinity();
  double ll = 0.0;
  if (grad) grad->setZero(coef.size() + 1);
  const double psi_s = digamma(s);
  const double psi_ns = digamma(n_trials + s);
  for (int i = 0; i < n; ++i) {
    const double eta = X.row(i).dot(coef);
    const double mu = sigmoid(eta);
    if (mu <= 0.0 || mu >= 1.0) return -std::numeric_limits<double>::infinity();
    const double a = mu * s;
    const double b = (1.0 - mu) * s;
    ll += log_choose(n_trials, y[i]) + std::lgamma(y[i] + a) + std::lgamma(n_trials - y[i] + b) -
          std::lgamma(n_trials + s) - std::lgamma(a) - std::lgamma(b) + std::lgamma(s);
    if (grad) {
      const double da = digamma(y[i] + a) - digamma(a);
      const double db = digamma(n_trials - y[i] + b) - digamma(b);
      const double dmu = s * (da - db);
      const double deta = dmu * mu * (1.0 - mu);
      grad->head(coef.size()) += deta * X.row(i).transpose();
      (*grad)[coef.size()] += s * (mu * da + (1.0 - mu) * db - (psi_ns - psi_s));
    }
  }
  return ll;
}

namespace {

Eigen::VectorXd fit_binomial_logistic(const std::vector<int>& y, const Eigen::MatrixXd& X,
                                      int n_trials) {
  const int p = static_cast<int>(X.cols());
  FitConfig cfg;
  cfg.max_lbfgs_iters = 500;
  cfg.grad_tol = 1e-8;
  ObjectiveFn obj = [&](const Eigen::VectorXd& beta, Eigen::VectorXd* g) {
    double ll = 0.0;
    if (g) g->setZero(p);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double eta = X.row(i).dot(beta);
      ll += y[i] * log_sigmoid(eta) + (n_trials - y[i]) * log_sigmoid(-eta);
      if (g) *g += (y[i] - n_trials * sigmoid(eta)) * X.row(i).transpose();
    }
    return ll;
  };
  return lbfgs_maximize(obj, Eigen::VectorXd::Zero(p), cfg).x;
}

}  // namespace

BetaBinomModel fit_betabinom(const std::vector<int>& y, const Eigen::MatrixXd& X, int n_trials) {
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(X.cols());
  if (n < p + 2) throw std::invalid_argument("fit_betabinom: needs at least p+2 observations");
  for (int v : y)
    if (v < 0 || v > n_trials) throw std::invalid_argument("fit_betabinom: response out of range");

  FitConfig cfg;
  cfg.max_lbfgs_iters = 1000;
  cfg.grad_tol = 1e-6;
  ObjectiveFn obj = [&](const Eigen::VectorXd& par, Eigen::VectorXd* g) {
    return betabinom_loglik(y, X, n_trials, par.head(p), par[p], g);
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(p + 1);
  x0[p] = std::log(10.0);  // dispersion init s = 10
  const LbfgsResult r = lbfgs_maximize(obj, x0, cfg);

  BetaBinomModel model;
  model.n_trials = n_trials;
  if (r.converged && r.x.head(p).allFinite() && std::abs(r.x[p]) < 30.0) {
    model.coef = r.x.head(p);
    model.log_s = r.x[p];
    model.converged = true;
    return model;
  }
  // separation or dispersion blow-up: fall back to the binomial limit
  model.coef = fit_binomial_logistic(y, X, n_trials);
  model.log_s = std::log(1e6);
  model.converged = false;
  model.fallback_binomial = true;
  return model;
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

LinearModel fit_linear(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const std::vector<std::string>* col_names) {
  if (X.rows() != y.size()) throw std::invalid_argument("fit_linear: size mismatch");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    std::string msg = "fit_linear: rank-deficient design; redundant columns:";
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < X.cols(); ++i) {
      const int col = perm[i];
      msg += " ";
      msg += (col_names && col < static_cast<int>(col_names->size()))
                 ? (*col_names)[col]
                 : ("col" + std::to_string(col));
    }
    throw std::invalid_argument(msg);
  }
  LinearModel m;
  m.coef = qr.solve(y);
  return m;
}

// ---------------------------------------------------------------------------
// Bagged regression trees
// ---------------------------------------------------------------------------

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  int min_node;
  std::vector<int> idx;  // row indices, permuted in place as nodes split
  RegressionTree tree;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // sum of child mean-square reductions, higher is better
    int left_count = 0;
  };

  // Best variance-reducing split of idx[lo, hi); ties resolved toward the
  // lowest feature index, then the lowest threshold (strict improvement).
  Split find_split(int lo, int hi, std::vector<std::pair<double, double>>& buf) const {
    const int n = hi - lo;
    double total = 0.0;
    for (int i = lo; i < hi; ++i) total += y[idx[i]];
    const double base = total * total / n;
    Split best;
    for (int f = 0; f < X.cols(); ++f) {
      buf.clear();
      for (int i = lo; i < hi; ++i) buf.emplace_back(X(idx[i], f), y[idx[i]]);
      std::sort(buf.begin(), buf.end());
      double left_sum = 0.0;
      for (int m = 1; m < n; ++m) {
        left_sum += buf[m - 1].second;
        if (m < min_node || n - m < min_node) continue;
        if (buf[m].first <= buf[m - 1].first) continue;  // no cut between equal values
        const double score =
            left_sum * left_sum / m + (total - left_sum) * (total - left_sum) / (n - m) - base;
        if (score > best.score) {
          best.feature = f;
          best.threshold = 0.5 * (buf[m - 1].first + buf[m].first);
          best.score = score;
          best.left_count = m;
        }
      }
    }
    return best;
  }

  int build(int lo, int hi, std::vector<std::pair<double, double>>& buf) {
    const int n = hi - lo;
    double mean = 0.0;
    for (int i = lo; i < hi; ++i) mean += y[idx[i]];
    mean /= n;
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, -1, -1, mean});
    if (n < 2 * min_node) {
      tree.min_leaf_count = std::min(tree.min_leaf_count, n);
      return node_id;
    }
    const Split s = find_split(lo, hi, buf);
    if (s.feature < 0) {
      tree.min_leaf_count = std::min(tree.min_leaf_count, n);
      return node_id;
    }
    const auto mid = std::stable_partition(idx.begin() + lo, idx.begin() + hi,
                                           [&](int i) { return X(i, s.feature) <= s.threshold; });
    const int split_at = static_cast<int>(mid - idx.begin());
    tree.nodes[node_id].feature = s.feature;
    tree.nodes[node_id].threshold = s.threshold;
    const int left = build(lo, split_at, buf);
    const int right = build(split_at, hi, buf);
    tree.nodes[node_id].left = left;
    tree.nodes[node_id].right = right;
    return node_id;
  }
};

}  // namespace

double RegressionTree::predict(const Eigen::VectorXd& x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left : nodes[node].right;
  }
  return nodes[node].value;
}

double BaggedTreesModel::predict(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

BaggedTreesModel fit_bagged_trees(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                  const BaggedTreesConfig& config) {
  const int n = static_cast<int>(y.size());
  if (X.rows() != n) throw std::invalid_argument("fit_bagged_trees: size mismatch");
  if (n < 2 * config.min_node_size)
    throw std::invalid_argument("fit_bagged_trees: needs at least 2*min_node_size rows");
  if (config.n_trees < 1) throw std::invalid_argument("fit_bagged_trees: n_trees must be positive");

  BaggedTreesModel model;
  model.config = config;
  model.trees.resize(config.n_trees);
  const Rng root(config.seed);
  parallel_blocks(config.n_trees, 1, [&](std::size_t b, std::size_t lo, std::size_t) {
    (void)b;
    const std::size_t tr = lo;
    Rng rng = root.substream(tr);
    TreeBuilder builder{X, y, config.min_node_size, {}, {}};
    builder.idx.resize(n);
    for (int i = 0; i < n; ++i) builder.idx[i] = rng.uniform_int(0, n - 1);  // bootstrap
    builder.tree.min_leaf_count = n;
    std::vector<std::pair<double, double>> buf;
    buf.reserve(n);
    builder.build(0, n, buf);
    model.trees[tr] = std::move(builder.tree);
  });
  return model;
}

}  // namespace luq
