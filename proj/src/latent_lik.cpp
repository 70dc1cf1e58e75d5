#include "luq/latent_lik.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "luq/dists.hpp"
#include "luq/parallel.hpp"
#include "luq/rng.hpp"

namespace luq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_theta(const Eigen::VectorXd& theta, int dim, const char* who) {
  if (theta.size() != dim) throw std::invalid_argument(std::string(who) + ": theta dimension mismatch");
  if (!theta.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite theta");
}

// (log sigmoid(x), log sigmoid(-x), sigmoid(x)) with a single exp
struct SigTriple {
  double lsp, lsm, sig;
};
inline SigTriple sig_triple(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    const double l = std::log1p(e);
    return {-l, -x - l, 1.0 / (1.0 + e)};
  }
  const double e = std::exp(x);
  const double l = std::log1p(e);
  return {x - l, -l, e / (1.0 + e)};
}

// Ordinal factor evaluation at one (level, shifted-cutpoint) configuration.
// Returns log pmf and the gradient coefficients gA (upper cutpoint slot) and
// gB (lower slot): d log p = gA d(cut_up) - gB d(cut_lo) + u (gB - gA) d(slope).
struct OrdinalEval {
  double logp, gA, gB;
};
inline OrdinalEval ordinal_eval(int level, int levels, const double* cuts, double slope, double u) {
  const double shift = slope * u;
  if (level == 1) {
    const double a = cuts[0] - shift;
    const SigTriple s = sig_triple(a);
    return {s.lsp, 1.0 - s.sig, 0.0};
  }
  if (level == levels) {
    const double b = cuts[levels - 2] - shift;
    const SigTriple s = sig_triple(b);
    return {s.lsm, 0.0, s.sig};
  }
  const double a = cuts[level - 1] - shift;
  const double b = cuts[level - 2] - shift;
  if (!(a > b)) return {kNegInf, 0.0, 0.0};  // disordered cutpoints: outside support
  const double sa = sigmoid(a);
  const double sb = sigmoid(b);
  const double p = sa - sb;
  if (p > 1e-280 && b < 20.0) {
    return {std::log(p), sa * (1.0 - sa) / p, sb * (1.0 - sb) / p};
  }
  // far tail (or catastrophic cancellation regime): log space
  const double logp = b + log_expm1(a - b) - softplus(a) - softplus(b);
  const double ga = std::exp(log_sigmoid(a) + log_sigmoid(-a) - logp);
  const double gb = std::exp(log_sigmoid(b) + log_sigmoid(-b) - logp);
  return {logp, ga, gb};
}

// Mallows normalizer pieces valid for any real lambda (the engine may probe
// slightly infeasible trial points; the penalty pushes them back).
inline void mallows_consts(double lambda, double& logz, double& meant) {
  const double e1 = std::exp(-lambda);
  const double e2 = e1 * e1;
  const double e3 = e2 * e1;
  const double z = 1.0 + 2.0 * e1 + 2.0 * e2 + e3;
  logz = std::log(z);
  meant = (2.0 * e1 + 4.0 * e2 + 3.0 * e3) / z;
}

}  // namespace

McDraws McDraws::standard_normal(int n_sim, int dim, std::uint64_t seed) {
  if (n_sim < 1 || dim < 1) throw std::invalid_argument("McDraws: positive sizes required");
  McDraws mc;
  mc.seed_tag = seed;
  mc.draws.resize(n_sim, dim);
  Rng rng(seed);
  for (int i = 0; i < n_sim; ++i)
    for (int d = 0; d < dim; ++d) mc.draws(i, d) = rng.normal();
  return mc;
}

Eigen::VectorXd BestFamily::pack(const GenParamsBest& params) const {
  Eigen::VectorXd theta(dim());
  if (include_questions)
    for (int t = 0; t < 2; ++t)
      for (int k = 0; k < 12; ++k)
        for (int c = 0; c < 3; ++c) theta[beta_index(t, k, c)] = params.beta[t][k][c];
  if (include_satisfaction)
    for (int t = 0; t < 2; ++t) {
      theta[alpha_slope_index(t)] = params.alpha_slope[t];
      for (int k = 0; k < 6; ++k) theta[alpha_cut_index(t, k)] = params.alpha_cut[t][k];
    }
  if (include_rankings) {
    if (shared_lambda) {
      theta[lambda_index(0)] = 0.5 * (params.lambda[0] + params.lambda[1]);
    } else {
      theta[lambda_index(0)] = params.lambda[0];
      theta[lambda_index(1)] = params.lambda[1];
    }
  }
  return theta;
}

std::string BestFamily::id() const {
  if (!include_questions && !include_rankings && !include_satisfaction) return "empty";
  if (include_questions && include_rankings && include_satisfaction)
    return shared_lambda ? "shared-lambda" : "full";
  if (include_questions && !include_rankings && include_satisfaction) return "no-ranking";
  if (include_questions && include_rankings && !include_satisfaction) return "no-satisfaction";
  return "custom";
}

BestFamily BestFamily::from_id(const std::string& id) {
  BestFamily f;
  if (id == "full") return f;
  if (id == "shared-lambda") {
    f.shared_lambda = true;
    return f;
  }
  if (id == "no-ranking") {
    f.include_rankings = false;
    return f;
  }
  if (id == "no-satisfaction") {
    f.include_satisfaction = false;
    return f;
  }
  if (id == "empty") {
    f.include_questions = f.include_rankings = f.include_satisfaction = false;
    return f;
  }
  throw std::invalid_argument("unknown BEST family id: " + id);
}

Eigen::VectorXd CatieFamily::pack(const GenParamsCatie& params) const {
  if (n_questions != params.beta1.size())
    throw std::invalid_argument("CatieFamily::pack: question count mismatch");
  Eigen::VectorXd theta(dim());
  for (int j = 0; j < n_questions; ++j) {
    theta[beta_index(j, 0)] = params.beta0[j];
    theta[beta_index(j, 1)] = params.beta1[j];
  }
  theta[alpha_index(0)] = params.alpha0;
  theta[alpha_index(1)] = params.alpha1;
  return theta;
}

CatieFamily CatieFamily::from_id(const std::string& id) {
  CatieFamily f;
  if (id == "luq") return f;
  if (id == "butler") {
    f.include_satisfaction = false;
    return f;
  }
  throw std::invalid_argument("unknown CATIE family id: " + id);
}

double LinearConstraint::eval(const Eigen::VectorXd& theta) const {
  double v = 0.0;
  for (const auto& [idx, coef] : terms) v += coef * theta[idx];
  return v;
}

std::vector<LinearConstraint> build_constraints(const BestFamily& family) {
  std::vector<LinearConstraint> cs;
  if (family.include_rankings) {
    cs.push_back({{{family.lambda_index(0), 1.0}}});
    if (!family.shared_lambda) cs.push_back({{{family.lambda_index(1), 1.0}}});
  }
  if (family.include_satisfaction) {
    for (int t = 0; t < 2; ++t) cs.push_back({{{family.alpha_slope_index(t), 1.0}}});
    for (int t = 0; t < 2; ++t)
      for (int k = 0; k < 5; ++k)
        cs.push_back({{{family.alpha_cut_index(t, k + 1), 1.0},
                       {family.alpha_cut_index(t, k), -1.0}}});
  }
  return cs;
}

std::vector<LinearConstraint> build_constraints(const CatieFamily& family) {
  return {{{{family.alpha_index(1), 1.0}}}};
}

Eigen::VectorXd constraint_values(const std::vector<LinearConstraint>& cs,
                                  const Eigen::VectorXd& theta) {
  Eigen::VectorXd v(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) v[i] = cs[i].eval(theta);
  return v;
}

double penalty(const std::vector<LinearConstraint>& cs, const Eigen::VectorXd& theta,
               Eigen::VectorXd* grad) {
  double value = 0.0;
  for (const auto& c : cs) {
    const double e = -100.0 * c.eval(theta);
    if (e > 690.0) return kNegInf;  // hard wall, value only
    const double w = std::exp(e);
    value -= 0.01 * w;
    if (grad)
      for (const auto& [idx, coef] : c.terms) (*grad)[idx] += w * coef;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Reference conditional densities
// ---------------------------------------------------------------------------

double best_log_f_conditional(const Eigen::VectorXd& theta, const BestFamily& family,
                              const TrajectoryBest& traj, const Eigen::Vector2d& v) {
  check_theta(theta, family.dim(), "best_log_f_conditional");
  const Eigen::VectorXd e = softmax_embed(v);
  double lf = 0.0;
  if (family.include_questions) {
    for (int t = 0; t < 2; ++t)
      for (int k = 0; k < 12; ++k) {
        const double eta = theta[family.beta_index(t, k, 0)] +
                           theta[family.beta_index(t, k, 1)] * v[0] +
                           theta[family.beta_index(t, k, 2)] * v[1];
        const int w = t == 0 ? traj.w1[k] : traj.w2[k];
        lf += bernoulli_logit_log_pmf(w, eta);
      }
  }
  if (family.include_rankings) {
    const Permutation3 center = rank_permutation(std::span<const double>(e.data(), 3));
    lf += mallows_log_pmf(traj.w1r, center, theta[family.lambda_index(0)]);
    lf += mallows_log_pmf(traj.w2r, center, theta[family.lambda_index(1)]);
  }
  if (family.include_satisfaction) {
    for (int t = 0; t < 2; ++t) {
      const auto& z = t == 0 ? traj.x2 : traj.y;
      const double eta = e[0] * z[0] + e[1] * z[1] + e[2] * z[2];
      std::array<double, 6> cuts;
      for (int k = 0; k < 6; ++k) cuts[k] = theta[family.alpha_cut_index(t, k)];
      lf += ordinal_log_pmf(t == 0 ? traj.b1 : traj.b2, eta,
                            std::span<const double>(cuts.data(), 6),
                            theta[family.alpha_slope_index(t)]);
    }
  }
  return lf;
}

double catie_log_f_conditional(const Eigen::VectorXd& theta, const CatieFamily& family,
                               const TrajectoryCatie& traj, double v) {
  check_theta(theta, family.dim(), "catie_log_f_conditional");
  double lf = 0.0;
  for (int j = 0; j < family.n_questions; ++j) {
    const double eta = theta[family.beta_index(j, 0)] + theta[family.beta_index(j, 1)] * v;
    lf += bernoulli_logit_log_pmf(traj.w[j], eta);
  }
  if (family.include_satisfaction) {
    const double e1 = 0.5 * std::erfc(-v / std::sqrt(2.0));
    const double u = e1 * traj.y[0] + (1.0 - e1) * traj.y[1];
    lf += poisson_log_pmf(traj.b, theta[family.alpha_index(0)] + theta[family.alpha_index(1)] * u);
  }
  return lf;
}

// ---------------------------------------------------------------------------
// BEST engine
// ---------------------------------------------------------------------------

BestLikelihood::BestLikelihood(const BestDataset& data, McDraws draws, BestFamily family)
    : family_(family), draws_(std::move(draws)) {
  if (data.empty()) throw std::invalid_argument("BestLikelihood: empty dataset");
  if (draws_.dim() != 2) throw std::invalid_argument("BestLikelihood: draws must be 2-d");
  const int ns = draws_.count();
  e_draws_.resize(3, ns);
  v1_.resize(ns);
  v2_.resize(ns);
  for (int c = 0; c < 6; ++c) tau_center_[c].resize(ns);
  for (int j = 0; j < ns; ++j) {
    const Eigen::Vector2d v = draws_.draws.row(j).transpose();
    v1_[j] = v[0];
    v2_[j] = v[1];
    const Eigen::VectorXd e = softmax_embed(v);
    e_draws_.col(j) = e;
    const Permutation3 r = rank_permutation(std::span<const double>(e.data(), 3));
    for (int c = 0; c < 6; ++c)
      tau_center_[c][j] = static_cast<double>(kendall_tau(Permutation3::from_index(c), r));
  }

  const int n = static_cast<int>(data.size());
  wbits_.resize(n);
  w1r_.resize(n);
  w2r_.resize(n);
  b1_.resize(n);
  b2_.resize(n);
  x2_.resize(n);
  y_.resize(n);
  for (int i = 0; i < n; ++i) {
    const TrajectoryBest& t = data[i];
    for (int k = 0; k < 12; ++k) {
      wbits_[i][k] = static_cast<std::uint8_t>(t.w1[k]);
      wbits_[i][12 + k] = static_cast<std::uint8_t>(t.w2[k]);
    }
    w1r_[i] = static_cast<std::uint8_t>(t.w1r.index());
    w2r_[i] = static_cast<std::uint8_t>(t.w2r.index());
    if (t.b1 < 1 || t.b1 > 7 || t.b2 < 1 || t.b2 > 7)
      throw std::invalid_argument("BestLikelihood: satisfaction level out of range");
    b1_[i] = static_cast<std::uint8_t>(t.b1);
    b2_[i] = static_cast<std::uint8_t>(t.b2);
    x2_[i] = Eigen::Vector3d(t.x2[0], t.x2[1], t.x2[2]);
    y_[i] = Eigen::Vector3d(t.y[0], t.y[1], t.y[2]);
  }
}

double BestLikelihood::value(const Eigen::VectorXd& theta) const { return evaluate(theta, nullptr); }

double BestLikelihood::value_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  grad.setZero(family_.dim());
  return evaluate(theta, &grad);
}

double BestLikelihood::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
  check_theta(theta, family_.dim(), "BestLikelihood");
  const int ns = draws_.count();
  const int n = n_obs();
  const int dim = family_.dim();
  const bool q_on = family_.include_questions;
  const bool r_on = family_.include_rankings;
  const bool s_on = family_.include_satisfaction;

  // Stage A: per-(question, draw) sigmoid tables, independent of observations.
  std::vector<double> lsp, lsm, sig;
  if (q_on) {
    lsp.resize(24 * ns);
    lsm.resize(24 * ns);
    sig.resize(24 * ns);
    parallel_blocks(24, 2, [&](std::size_t, std::size_t qlo, std::size_t qhi) {
      for (std::size_t q = qlo; q < qhi; ++q) {
        const int t = static_cast<int>(q) / 12;
        const int k = static_cast<int>(q) % 12;
        const double b0 = theta[family_.beta_index(t, k, 0)];
        const double b1 = theta[family_.beta_index(t, k, 1)];
        const double b2 = theta[family_.beta_index(t, k, 2)];
        double* Lp = lsp.data() + q * ns;
        double* Lm = lsm.data() + q * ns;
        double* Sg = sig.data() + q * ns;
        for (int j = 0; j < ns; ++j) {
          const SigTriple s = sig_triple(b0 + b1 * v1_[j] + b2 * v2_[j]);
          Lp[j] = s.lsp;
          Lm[j] = s.lsm;
          Sg[j] = s.sig;
        }
      }
    });
  }

  double lambda1 = 0.0, lambda2 = 0.0, logz1 = 0.0, logz2 = 0.0, meant1 = 0.0, meant2 = 0.0;
  if (r_on) {
    lambda1 = theta[family_.lambda_index(0)];
    lambda2 = theta[family_.lambda_index(1)];
    mallows_consts(lambda1, logz1, meant1);
    mallows_consts(lambda2, logz2, meant2);
  }

  double slope[2] = {0.0, 0.0};
  double cuts[2][6];
  if (s_on) {
    for (int t = 0; t < 2; ++t) {
      slope[t] = theta[family_.alpha_slope_index(t)];
      for (int k = 0; k < 6; ++k) cuts[t][k] = theta[family_.alpha_cut_index(t, k)];
    }
  }

  const double log_ns = std::log(static_cast<double>(ns));
  const double const_per_obs = (r_on ? -logz1 - logz2 : 0.0) - log_ns;

  const std::size_t block = 16;
  const std::size_t nb = num_blocks(n, block);
  std::vector<double> block_value(nb, 0.0);
  std::vector<Eigen::VectorXd> block_grad;
  if (grad) block_grad.assign(nb, Eigen::VectorXd::Zero(dim));

  parallel_blocks(n, block, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
    std::vector<double> acc(ns), u1(ns), u2(ns), gA1(ns), gB1(ns), gA2(ns), gB2(ns);
    double vsum = 0.0;
    Eigen::VectorXd* g = grad ? &block_grad[bi] : nullptr;
    for (std::size_t i = lo; i < hi; ++i) {
      // pass 1: log f for each draw
      std::fill(acc.begin(), acc.end(), 0.0);
      if (q_on) {
        for (int q = 0; q < 24; ++q) {
          const double* row = (wbits_[i][q] ? lsp.data() : lsm.data()) + q * ns;
          for (int j = 0; j < ns; ++j) acc[j] += row[j];
        }
      }
      if (r_on) {
        const double* row1 = tau_center_[w1r_[i]].data();
        const double* row2 = tau_center_[w2r_[i]].data();
        for (int j = 0; j < ns; ++j) acc[j] -= lambda1 * row1[j] + lambda2 * row2[j];
      }
      if (s_on) {
        const Eigen::Vector3d x2 = x2_[i];
        const Eigen::Vector3d yv = y_[i];
        const int bl1 = b1_[i], bl2 = b2_[i];
        for (int j = 0; j < ns; ++j) {
          const double e0 = e_draws_(0, j), e1 = e_draws_(1, j), e2 = e_draws_(2, j);
          u1[j] = e0 * x2[0] + e1 * x2[1] + e2 * x2[2];
          u2[j] = e0 * yv[0] + e1 * yv[1] + e2 * yv[2];
          const OrdinalEval o1 = ordinal_eval(bl1, 7, cuts[0], slope[0], u1[j]);
          const OrdinalEval o2 = ordinal_eval(bl2, 7, cuts[1], slope[1], u2[j]);
          acc[j] += o1.logp + o2.logp;
          gA1[j] = o1.gA;
          gB1[j] = o1.gB;
          gA2[j] = o2.gA;
          gB2[j] = o2.gB;
        }
      }

      double m = kNegInf;
      for (int j = 0; j < ns; ++j) m = std::max(m, acc[j]);
      if (!std::isfinite(m)) {
        vsum = kNegInf;
        continue;
      }
      double wsum = 0.0;
      for (int j = 0; j < ns; ++j) {
        acc[j] = std::exp(acc[j] - m);  // now holds unnormalized weights
        wsum += acc[j];
      }
      vsum += m + std::log(wsum) + const_per_obs;

      if (!g) continue;
      const double inv = 1.0 / wsum;
      for (int j = 0; j < ns; ++j) acc[j] *= inv;  // softmax weights over draws

      if (q_on) {
        for (int q = 0; q < 24; ++q) {
          const double* Sg = sig.data() + q * ns;
          const double wq = static_cast<double>(wbits_[i][q]);
          double g0 = 0.0, g1 = 0.0, g2 = 0.0;
          for (int j = 0; j < ns; ++j) {
            const double c = acc[j] * (wq - Sg[j]);
            g0 += c;
            g1 += c * v1_[j];
            g2 += c * v2_[j];
          }
          const int t = q / 12, k = q % 12;
          (*g)[family_.beta_index(t, k, 0)] += g0;
          (*g)[family_.beta_index(t, k, 1)] += g1;
          (*g)[family_.beta_index(t, k, 2)] += g2;
        }
      }
      if (r_on) {
        const double* row1 = tau_center_[w1r_[i]].data();
        const double* row2 = tau_center_[w2r_[i]].data();
        double t1 = 0.0, t2 = 0.0;
        for (int j = 0; j < ns; ++j) {
          t1 += acc[j] * row1[j];
          t2 += acc[j] * row2[j];
        }
        (*g)[family_.lambda_index(0)] += meant1 - t1;
        (*g)[family_.lambda_index(1)] += meant2 - t2;
      }
      if (s_on) {
        const int bl[2] = {b1_[i], b2_[i]};
        const double* GA[2] = {gA1.data(), gA2.data()};
        const double* GB[2] = {gB1.data(), gB2.data()};
        const double* U[2] = {u1.data(), u2.data()};
        for (int t = 0; t < 2; ++t) {
          double ga = 0.0, gb = 0.0, gs = 0.0;
          for (int j = 0; j < ns; ++j) {
            const double w = acc[j];
            ga += w * GA[t][j];
            gb += w * GB[t][j];
            gs += w * U[t][j] * (GB[t][j] - GA[t][j]);
          }
          if (bl[t] <= 6) (*g)[family_.alpha_cut_index(t, bl[t] - 1)] += ga;
          if (bl[t] >= 2) (*g)[family_.alpha_cut_index(t, bl[t] - 2)] -= gb;
          (*g)[family_.alpha_slope_index(t)] += gs;
        }
      }
    }
    block_value[bi] = vsum;
  });

  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) total += block_value[b];
  if (grad) {
    for (std::size_t b = 0; b < nb; ++b) *grad += block_grad[b];
    if (!std::isfinite(total)) grad->setZero();
  }
  return total;
}

// ---------------------------------------------------------------------------
// CATIE engine
// ---------------------------------------------------------------------------

CatieLikelihood::CatieLikelihood(const CatieDataset& data, McDraws draws, CatieFamily family)
    : family_(family), draws_(std::move(draws)) {
  if (data.empty()) throw std::invalid_argument("CatieLikelihood: empty dataset");
  if (draws_.dim() != 1) throw std::invalid_argument("CatieLikelihood: draws must be 1-d");
  const int ns = draws_.count();
  v_.resize(ns);
  e1_.resize(ns);
  for (int j = 0; j < ns; ++j) {
    v_[j] = draws_.draws(j, 0);
    e1_[j] = 0.5 * std::erfc(-v_[j] / std::sqrt(2.0));
  }
  const int n = static_cast<int>(data.size());
  w_.resize(n);
  b_.resize(n);
  lgamma_b1_.resize(n);
  y2_.resize(n);
  dy_.resize(n);
  for (int i = 0; i < n; ++i) {
    const TrajectoryCatie& t = data[i];
    w_[i].resize(family_.n_questions);
    for (int j = 0; j < family_.n_questions; ++j) w_[i][j] = static_cast<std::uint8_t>(t.w[j]);
    b_[i] = t.b;
    lgamma_b1_[i] = std::lgamma(t.b + 1.0);
    y2_[i] = t.y[1];
    dy_[i] = t.y[0] - t.y[1];
  }
}

double CatieLikelihood::value(const Eigen::VectorXd& theta) const { return evaluate(theta, nullptr); }

double CatieLikelihood::value_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  grad.setZero(family_.dim());
  return evaluate(theta, &grad);
}

double CatieLikelihood::evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
  check_theta(theta, family_.dim(), "CatieLikelihood");
  const int ns = draws_.count();
  const int n = n_obs();
  const int nq = family_.n_questions;
  const bool s_on = family_.include_satisfaction;

  std::vector<double> lsp(nq * ns), lsm(nq * ns), sig(nq * ns);
  for (int q = 0; q < nq; ++q) {
    const double b0 = theta[family_.beta_index(q, 0)];
    const double b1 = theta[family_.beta_index(q, 1)];
    double* Lp = lsp.data() + q * ns;
    double* Lm = lsm.data() + q * ns;
    double* Sg = sig.data() + q * ns;
    for (int j = 0; j < ns; ++j) {
      const SigTriple s = sig_triple(b0 + b1 * v_[j]);
      Lp[j] = s.lsp;
      Lm[j] = s.lsm;
      Sg[j] = s.sig;
    }
  }
  const double a0 = s_on ? theta[family_.alpha_index(0)] : 0.0;
  const double a1 = s_on ? theta[family_.alpha_index(1)] : 0.0;

  const double log_ns = std::log(static_cast<double>(ns));
  const std::size_t block = 64;
  const std::size_t nb = num_blocks(n, block);
  std::vector<double> block_value(nb, 0.0);
  std::vector<Eigen::VectorXd> block_grad;
  if (grad) block_grad.assign(nb, Eigen::VectorXd::Zero(family_.dim()));

  parallel_blocks(n, block, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
    std::vector<double> acc(ns), resid(ns), uu(ns);
    double vsum = 0.0;
    Eigen::VectorXd* g = grad ? &block_grad[bi] : nullptr;
    for (std::size_t i = lo; i < hi; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int q = 0; q < nq; ++q) {
        const double* row = (w_[i][q] ? lsp.data() : lsm.data()) + q * ns;
        for (int j = 0; j < ns; ++j) acc[j] += row[j];
      }
      if (s_on) {
        const double bi_count = static_cast<double>(b_[i]);
        for (int j = 0; j < ns; ++j) {
          const double u = y2_[i] + e1_[j] * dy_[i];
          const double m = a0 + a1 * u;
          const double em = m > 690.0 ? std::numeric_limits<double>::infinity() : std::exp(m);
          acc[j] += bi_count * m - em - lgamma_b1_[i];
          uu[j] = u;
          resid[j] = bi_count - em;
        }
      }
      double m = kNegInf;
      for (int j = 0; j < ns; ++j) m = std::max(m, acc[j]);
      if (!std::isfinite(m)) {
        vsum = kNegInf;
        continue;
      }
      double wsum = 0.0;
      for (int j = 0; j < ns; ++j) {
        acc[j] = std::exp(acc[j] - m);
        wsum += acc[j];
      }
      vsum += m + std::log(wsum) - log_ns;

      if (!g) continue;
      const double inv = 1.0 / wsum;
      for (int j = 0; j < ns; ++j) acc[j] *= inv;
      for (int q = 0; q < nq; ++q) {
        const double* Sg = sig.data() + q * ns;
        const double wq = static_cast<double>(w_[i][q]);
        double g0 = 0.0, g1 = 0.0;
        for (int j = 0; j < ns; ++j) {
          const double c = acc[j] * (wq - Sg[j]);
          g0 += c;
          g1 += c * v_[j];
        }
        (*g)[family_.beta_index(q, 0)] += g0;
        (*g)[family_.beta_index(q, 1)] += g1;
      }
      if (s_on) {
        double ga0 = 0.0, ga1 = 0.0;
        for (int j = 0; j < ns; ++j) {
          if (acc[j] <= 0.0) continue;  // weight 0: skip possibly non-finite residual
          ga0 += acc[j] * resid[j];
          ga1 += acc[j] * resid[j] * uu[j];
        }
        (*g)[family_.alpha_index(0)] += ga0;
        (*g)[family_.alpha_index(1)] += ga1;
      }
    }
    block_value[bi] = vsum;
  });

  double total = 0.0;
  for (std::size_t b = 0; b < nb; ++b) total += block_value[b];
  if (grad) {
    for (std::size_t b = 0; b < nb; ++b) *grad += block_grad[b];
    if (!std::isfinite(total)) grad->setZero();
  }
  return total;
}

double mc_loglik_best(const Eigen::VectorXd& theta, const BestFamily& family,
                      const BestDataset& data, const McDraws& draws) {
  return BestLikelihood(data, draws, family).value(theta);
}

double mc_loglik_catie(const Eigen::VectorXd& theta, const CatieFamily& family,
                       const CatieDataset& data, const McDraws& draws) {
  return CatieLikelihood(data, draws, family).value(theta);
}

}  // namespace luq
