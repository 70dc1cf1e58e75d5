#include "luq/posterior.hpp"

#include <cmath>
#include <limits>

#include "luq/dists.hpp"
#include "luq/parallel.hpp"

namespace luq {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::pair<double, double> log_sigmoid_pair(double x) {
  if (x >= 0.0) {
    const double l = std::log1p(std::exp(-x));
    return {-l, -x - l};
  }
  const double l = std::log1p(std::exp(x));
  return {x - l, -l};
}
}  // namespace

PosteriorWeight self_normalized_mean(const Eigen::MatrixXd& e_points,
                                     const std::vector<double>& log_weights) {
  const int n = static_cast<int>(log_weights.size());
  if (e_points.cols() != n || n == 0)
    throw std::invalid_argument("self_normalized_mean: size mismatch");
  double m = kNegInf;
  for (double lw : log_weights) m = std::max(m, lw);
  if (!std::isfinite(m))
    throw DegeneratePosteriorError(
        "self_normalized_mean: all weights vanished (max log-weight = -inf over " +
        std::to_string(n) + " points)");
  double wsum = 0.0, wsq = 0.0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(e_points.rows());
  for (int j = 0; j < n; ++j) {
    const double w = std::exp(log_weights[j] - m);
    wsum += w;
    wsq += w * w;
    acc += w * e_points.col(j);
  }
  PosteriorWeight out;
  out.weights = acc / wsum;
  out.ess = wsum * wsum / wsq;
  return out;
}

// ---------------------------------------------------------------------------
// BEST
// ---------------------------------------------------------------------------

BestPosteriorEngine::BestPosteriorEngine(Eigen::VectorXd theta, BestFamily family, McDraws draws)
    : theta_(std::move(theta)), family_(family), draws_(std::move(draws)) {
  if (theta_.size() != family_.dim())
    throw std::invalid_argument("BestPosteriorEngine: theta dimension mismatch");
  if (draws_.dim() != 2) throw std::invalid_argument("BestPosteriorEngine: draws must be 2-d");
  const int ns = draws_.count();
  e_draws_.resize(3, ns);
  for (int c = 0; c < 6; ++c) tau_center_[c].resize(ns);
  for (int j = 0; j < ns; ++j) {
    const Eigen::Vector2d v = draws_.draws.row(j).transpose();
    const Eigen::VectorXd e = softmax_embed(v);
    e_draws_.col(j) = e;
    const Permutation3 r = rank_permutation(std::span<const double>(e.data(), 3));
    for (int c = 0; c < 6; ++c)
      tau_center_[c][j] = static_cast<double>(kendall_tau(Permutation3::from_index(c), r));
  }
  if (family_.include_questions) {
    lsp_.resize(24 * ns);
    lsm_.resize(24 * ns);
    for (int q = 0; q < 24; ++q) {
      const int t = q / 12, k = q % 12;
      const double b0 = theta_[family_.beta_index(t, k, 0)];
      const double b1 = theta_[family_.beta_index(t, k, 1)];
      const double b2 = theta_[family_.beta_index(t, k, 2)];
      for (int j = 0; j < ns; ++j) {
        const auto [lp, lm] =
            log_sigmoid_pair(b0 + b1 * draws_.draws(j, 0) + b2 * draws_.draws(j, 1));
        lsp_[q * ns + j] = lp;
        lsm_[q * ns + j] = lm;
      }
    }
  }
  if (family_.include_rankings) {
    for (int t = 0; t < 2; ++t) {
      lambda_[t] = theta_[family_.lambda_index(t)];
      logz_[t] = mallows_log_normalizer(lambda_[t]);
    }
  }
  if (family_.include_satisfaction) {
    slope_ = theta_[family_.alpha_slope_index(0)];
    for (int k = 0; k < 6; ++k) cuts_[k] = theta_[family_.alpha_cut_index(0, k)];
  }
}

std::vector<double> BestPosteriorEngine::log_weights(const TrajectoryBest& h2) const {
  const int ns = draws_.count();
  std::vector<double> lw(ns, 0.0);
  if (family_.include_questions) {
    for (int q = 0; q < 24; ++q) {
      const int w = q < 12 ? h2.w1[q] : h2.w2[q - 12];
      const double* row = (w ? lsp_.data() : lsm_.data()) + q * ns;
      for (int j = 0; j < ns; ++j) lw[j] += row[j];
    }
  }
  if (family_.include_rankings) {
    const double* row1 = tau_center_[h2.w1r.index()].data();
    const double* row2 = tau_center_[h2.w2r.index()].data();
    const double c = logz_[0] + logz_[1];
    for (int j = 0; j < ns; ++j) lw[j] -= lambda_[0] * row1[j] + lambda_[1] * row2[j] + c;
  }
  if (family_.include_satisfaction) {
    const Eigen::Vector3d x2(h2.x2[0], h2.x2[1], h2.x2[2]);
    for (int j = 0; j < ns; ++j) {
      const double u = e_draws_.col(j).dot(x2);
      lw[j] += ordinal_log_pmf(h2.b1, u, std::span<const double>(cuts_, 6), slope_);
    }
  }
  return lw;
}

PosteriorWeight BestPosteriorEngine::weights(const TrajectoryBest& h2) const {
  return self_normalized_mean(e_draws_, log_weights(h2));
}

// ---------------------------------------------------------------------------
// CATIE
// ---------------------------------------------------------------------------

CatiePosteriorEngine::CatiePosteriorEngine(Eigen::VectorXd theta, CatieFamily family,
                                           McDraws draws)
    : theta_(std::move(theta)), family_(family), draws_(std::move(draws)) {
  if (theta_.size() != family_.dim())
    throw std::invalid_argument("CatiePosteriorEngine: theta dimension mismatch");
  if (draws_.dim() != 1) throw std::invalid_argument("CatiePosteriorEngine: draws must be 1-d");
  const int ns = draws_.count();
  const int nq = family_.n_questions;
  e_draws_.resize(2, ns);
  lsp_.resize(nq * ns);
  lsm_.resize(nq * ns);
  for (int j = 0; j < ns; ++j) {
    const double v = draws_.draws(j, 0);
    const double e1 = 0.5 * std::erfc(-v / std::sqrt(2.0));
    e_draws_(0, j) = e1;
    e_draws_(1, j) = 1.0 - e1;
  }
  for (int q = 0; q < nq; ++q) {
    const double b0 = theta_[family_.beta_index(q, 0)];
    const double b1 = theta_[family_.beta_index(q, 1)];
    for (int j = 0; j < ns; ++j) {
      const auto [lp, lm] = log_sigmoid_pair(b0 + b1 * draws_.draws(j, 0));
      lsp_[q * ns + j] = lp;
      lsm_[q * ns + j] = lm;
    }
  }
}

std::vector<double> CatiePosteriorEngine::log_weights(const TrajectoryCatie& h1) const {
  const int ns = draws_.count();
  const int nq = family_.n_questions;
  std::vector<double> lw(ns, 0.0);
  for (int q = 0; q < nq; ++q) {
    const double* row = (h1.w[q] ? lsp_.data() : lsm_.data()) + q * ns;
    for (int j = 0; j < ns; ++j) lw[j] += row[j];
  }
  return lw;
}

PosteriorWeight CatiePosteriorEngine::weights(const TrajectoryCatie& h1) const {
  return self_normalized_mean(e_draws_, log_weights(h1));
}

// ---------------------------------------------------------------------------
// Wrappers and metrics
// ---------------------------------------------------------------------------

PosteriorWeight posterior_mean_E(const Eigen::VectorXd& theta, const BestFamily& family,
                                 const TrajectoryBest& h2, const McDraws& draws) {
  return BestPosteriorEngine(theta, family, draws).weights(h2);
}

PosteriorWeight posterior_mean_E(const Eigen::VectorXd& theta, const CatieFamily& family,
                                 const TrajectoryCatie& h1, const McDraws& draws) {
  return CatiePosteriorEngine(theta, family, draws).weights(h1);
}

double posterior_error_metric(const Eigen::VectorXd& theta_true, const CatieFamily& family_true,
                              const Eigen::VectorXd& theta_hat, const CatieFamily& family_hat,
                              const CatieDataset& test_histories, const McDraws& mc_oracle,
                              const McDraws& mc_fit) {
  if (test_histories.empty())
    throw std::invalid_argument("posterior_error_metric: no test histories");
  const CatiePosteriorEngine oracle(theta_true, family_true, mc_oracle);
  const CatiePosteriorEngine fitted(theta_hat, family_hat, mc_fit);

  const std::size_t n = test_histories.size();
  std::vector<double> block_sum(num_blocks(n, 64), 0.0);
  parallel_blocks(n, 64, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = oracle.weights(test_histories[i]).weights[0];
      const double c = fitted.weights(test_histories[i]).weights[0];
      s += std::abs(a - c);
    }
    block_sum[b] = s;
  });
  double total = 0.0;
  for (double s : block_sum) total += s;
  return total / static_cast<double>(n);
}

}  // namespace luq
