/*
 * Copyright 2026 the lrvm authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LRVM_RVM_HPP_
#define LRVM_RVM_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lrvm/common.hpp"
#include "lrvm/kernel.hpp"

namespace lrvm {

/// N x M basis evaluations; column 0 is an all-ones bias column when
/// has_bias is set.
struct DesignMatrix {
  Eigen::MatrixXd values;
  bool has_bias = true;
};

/// Per-basis prior precisions; +infinity marks a pruned basis.
struct RvmHyper {
  Vector alpha;

  std::vector<Eigen::Index> active() const {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
      if (std::isfinite(alpha(i))) idx.push_back(i);
    return idx;
  }
};

/// Surviving bases of a trained model. `active` holds design-column
/// indices (0 = bias when has_bias); `weights` and `alpha_final` align
/// with it.
struct RvmModel {
  std::vector<Eigen::Index> active;
  Vector weights;
  double gamma = 1.0;
  Vector alpha_final;
  bool has_bias = true;

  /// Count of surviving kernel bases (bias excluded).
  Eigen::Index relevance_count() const {
    Eigen::Index n = 0;
    for (Eigen::Index a : active)
      if (!(has_bias && a == 0)) ++n;
    return n;
  }
};

struct TrainReport {
  int outer_iterations = 0;
  int final_active = 0;
  bool converged = false;
  int jitter_events = 0;
  std::vector<int> active_counts;  // after each outer iteration
};

/// Laplace approximation at the posterior mode for fixed alphas.
struct PosteriorState {
  Vector w_hat;
  Eigen::MatrixXd sigma;
  Vector b_diag;  // sigmoid'(z_n) at the mode
  bool converged = false;
  int newton_steps = 0;
  int jitter_events = 0;
};

struct TrainerSettings {
  double inner_tol = 1e-6;
  int inner_max_steps = 25;
  int max_halvings = 10;
  double alpha_tol = 1e-3;  // on |delta log alpha|
  int outer_max = 500;
  double alpha_init = 1e-4;
  double prune_threshold = 1e9;
  double jitter_rel = 1e-8;
  int jitter_max_escalations = 3;
  double gamma = 1.0;  // kernel width recorded into trained models
};

/// Overflow-safe logistic function.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

/// log p(t|w) - 0.5 w'Aw for logits z = design * w.
inline double penalized_loglik(const Vector& z, const Vector& td,
                               const Vector& alpha, const Vector& w) {
  double ll = 0.0;
  for (Eigen::Index n = 0; n < z.size(); ++n)
    ll += td(n) * z(n) - softplus(z(n));
  return ll - 0.5 * (alpha.array() * w.array().square()).sum();
}

inline double penalized_loglik(const Vector& z, const std::vector<int>& t,
                               const Vector& alpha, const Vector& w) {
  Vector td(z.size());
  for (Eigen::Index n = 0; n < z.size(); ++n)
    td(n) = t[static_cast<std::size_t>(n)];
  return penalized_loglik(z, td, alpha, w);
}

/// Cholesky with escalating diagonal jitter, factoring into a caller-owned
/// object so hot loops avoid reallocating; increments `jitter_events` once
/// per jittered retry that was needed. Only the lower triangle of H is
/// consulted, matching the factorization itself.
inline void jittered_llt_into(Eigen::LLT<Eigen::MatrixXd>& llt,
                              const Eigen::MatrixXd& H, const TrainerSettings& cfg,
                              int& jitter_events, Eigen::MatrixXd& scratch) {
  // Eigen's LLT reports success on NaN input, so screen it out explicitly.
  // A finite sum of squares certifies every entry it covers; the exact scan
  // only runs when that sum overflows.
  double screen = 0.0;
  for (Eigen::Index j = 0; j < H.cols(); ++j)
    screen += H.col(j).tail(H.rows() - j).squaredNorm();
  if (!std::isfinite(screen)) {
    bool finite = true;
    for (Eigen::Index j = 0; j < H.cols() && finite; ++j)
      finite = H.col(j).tail(H.rows() - j).allFinite();
    if (!finite)
      throw std::runtime_error("irls_posterior: non-finite Hessian");
  }
  llt.compute(H);
  if (llt.info() == Eigen::Success) return;
  const Eigen::Index m = H.rows();
  double jitter = cfg.jitter_rel * H.trace() / static_cast<double>(m);
  for (int attempt = 0; attempt < cfg.jitter_max_escalations; ++attempt) {
    scratch = H;
    scratch.diagonal().array() += jitter;
    llt.compute(scratch);
    ++jitter_events;
    if (llt.info() == Eigen::Success) return;
    jitter *= 10.0;
  }
  throw std::runtime_error("irls_posterior: system stayed singular after jitter escalation");
}

inline Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& H,
                                                const TrainerSettings& cfg,
                                                int& jitter_events) {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd scratch;
  jittered_llt_into(llt, H, cfg, jitter_events, scratch);
  return llt;
}

/// Unblocked in-place Cholesky: on success the lower triangle holds L with
/// L L' = A. Succeeds only on strictly positive pivots, so a NaN pivot also
/// reports failure. Deliberately unblocked: at the trainer's matrix sizes
/// the blocked factorization spends more on panel packing than on
/// arithmetic.
inline bool chol_lower_inplace(Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  for (Eigen::Index k = 0; k < m; ++k) {
    double x = a(k, k);
    if (k > 0) x -= a.row(k).head(k).squaredNorm();
    if (!(x > 0.0)) return false;
    x = std::sqrt(x);
    a(k, k) = x;
    const Eigen::Index rs = m - k - 1;
    if (rs > 0) {
      if (k > 0)
        a.col(k).tail(rs).noalias() -=
            a.bottomLeftCorner(rs, k) * a.row(k).head(k).transpose();
      a.col(k).tail(rs) /= x;
    }
  }
  return true;
}

/// jittered_llt_into with the factor written into the lower triangle of a
/// caller-owned matrix instead of an LLT object; same screening, ladder,
/// and error messages. Only the lower triangle of H is consulted.
inline void jittered_chol_into(Eigen::MatrixXd& L, const Eigen::MatrixXd& H,
                               const TrainerSettings& cfg, int& jitter_events) {
  double screen = 0.0;
  for (Eigen::Index j = 0; j < H.cols(); ++j)
    screen += H.col(j).tail(H.rows() - j).squaredNorm();
  if (!std::isfinite(screen)) {
    bool finite = true;
    for (Eigen::Index j = 0; j < H.cols() && finite; ++j)
      finite = H.col(j).tail(H.rows() - j).allFinite();
    if (!finite)
      throw std::runtime_error("irls_posterior: non-finite Hessian");
  }
  L = H;
  if (chol_lower_inplace(L)) return;
  double jitter = cfg.jitter_rel * H.trace() / static_cast<double>(H.rows());
  for (int attempt = 0; attempt < cfg.jitter_max_escalations; ++attempt) {
    L = H;
    L.diagonal().array() += jitter;
    ++jitter_events;
    if (chol_lower_inplace(L)) return;
    jitter *= 10.0;
  }
  throw std::runtime_error("irls_posterior: system stayed singular after jitter escalation");
}

inline void check_binary_targets(const std::vector<int>& t) {
  for (int v : t)
    if (v != 0 && v != 1)
      throw std::invalid_argument("targets must be 0/1");
}

/// Buffers reused across the many small mode searches of a training run.
/// After irls_mode returns, `H` holds the Hessian (lower triangle) at the
/// mode; `chol` and `llt` are spare factor slots for the caller.
struct IrlsWorkspace {
  Vector td, y, r, b, g, d, dz, w, w_try, z, z_try, bcol;
  Eigen::MatrixXd H, chol, scratch;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

/// Lower triangle of design' diag(b) design + diag(alpha); the strict
/// upper part is left untouched. One weighted column at a time keeps the
/// work at m(m+1)/2 dot products, which beats a general matrix product at
/// the sizes local trainers see, and the factorization reads just that half.
inline void weighted_gram_lower(const Eigen::MatrixXd& design, const Vector& b,
                                const Vector& alpha, Eigen::MatrixXd& H,
                                Vector& bcol) {
  const Eigen::Index m = design.cols();
  H.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    bcol = b.cwiseProduct(design.col(j));
    H.col(j).tail(m - j).noalias() = design.rightCols(m - j).transpose() * bcol;
    H(j, j) += alpha(j);
  }
}

struct IrlsMode {
  Vector w_hat;
  Vector b_diag;
  bool converged = false;
  int newton_steps = 0;
  int jitter_events = 0;
};

inline IrlsMode irls_mode(const Eigen::MatrixXd& design, const std::vector<int>& t,
                          const Vector& alpha, const TrainerSettings& cfg,
                          const Vector* warm_start, IrlsWorkspace& ws) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  if (m < 1) throw std::invalid_argument("irls_posterior: no active basis");
  if (alpha.size() != m)
    throw std::invalid_argument("irls_posterior: alpha size mismatch");
  if (static_cast<Eigen::Index>(t.size()) != n)
    throw std::invalid_argument("irls_posterior: target size mismatch");
  check_binary_targets(t);
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(alpha(i) > 0.0) || !std::isfinite(alpha(i)))
      throw std::invalid_argument("irls_posterior: alphas must be positive and finite");

  IrlsMode out;
  if (warm_start)
    ws.w = *warm_start;
  else
    ws.w = Vector::Zero(m);
  ws.z.noalias() = design * ws.w;

  ws.td.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) ws.td(i) = t[static_cast<std::size_t>(i)];
  ws.y.resize(n);
  double obj = penalized_loglik(ws.z, ws.td, alpha, ws.w);

  for (int step = 0; step < cfg.inner_max_steps; ++step) {
    for (Eigen::Index i = 0; i < n; ++i) ws.y(i) = sigmoid(ws.z(i));
    ws.r = ws.td - ws.y;
    ws.g.noalias() = design.transpose() * ws.r;
    ws.g -= (alpha.array() * ws.w.array()).matrix();

    ws.b = (ws.y.array() * (1.0 - ws.y.array())).matrix();
    weighted_gram_lower(design, ws.b, alpha, ws.H, ws.bcol);

    jittered_chol_into(ws.chol, ws.H, cfg, out.jitter_events);
    ws.d = ws.g;
    ws.chol.triangularView<Eigen::Lower>().solveInPlace(ws.d);
    ws.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(ws.d);
    // One matrix-vector product serves every halving below, since the
    // trial logits are z + stride * (design * d).
    ws.dz.noalias() = design * ws.d;

    double stride = 1.0;
    bool accepted = false;
    double obj_try = 0.0;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      ws.w_try = ws.w + stride * ws.d;
      ws.z_try = ws.z + stride * ws.dz;
      obj_try = penalized_loglik(ws.z_try, ws.td, alpha, ws.w_try);
      if (obj_try >= obj) {
        accepted = true;
        break;
      }
      stride *= 0.5;
    }
    ++out.newton_steps;
    if (!accepted) {
      // No ascent step found; we are at (or numerically on top of) the mode.
      out.converged = ws.g.lpNorm<Eigen::Infinity>() <=
                      1e-6 * (1.0 + (alpha.array() * ws.w.array()).abs().maxCoeff());
      break;
    }
    const double max_delta = stride * ws.d.lpNorm<Eigen::Infinity>();
    ws.w.swap(ws.w_try);
    ws.z.swap(ws.z_try);
    obj = obj_try;
    if (max_delta < cfg.inner_tol) {
      out.converged = true;
      break;
    }
  }

  // Hessian (lower triangle) at the final iterate, ready for the Laplace
  // factorization.
  for (Eigen::Index i = 0; i < n; ++i) ws.y(i) = sigmoid(ws.z(i));
  out.b_diag = (ws.y.array() * (1.0 - ws.y.array())).matrix();
  weighted_gram_lower(design, out.b_diag, alpha, ws.H, ws.bcol);
  out.w_hat = ws.w;
  return out;
}

}  // namespace detail

/// Newton/IRLS search for the mode of the Bernoulli likelihood with a
/// Gaussian prior of precisions `alpha` (all finite), plus the Laplace
/// covariance (design' B design + A)^-1 evaluated at the mode.
inline PosteriorState irls_posterior(const Eigen::MatrixXd& design,
                                     const std::vector<int>& t,
                                     const Vector& alpha,
                                     const TrainerSettings& cfg = {},
                                     const Vector* warm_start = nullptr) {
  detail::IrlsWorkspace ws;
  detail::IrlsMode mode = detail::irls_mode(design, t, alpha, cfg, warm_start, ws);

  PosteriorState out;
  out.converged = mode.converged;
  out.newton_steps = mode.newton_steps;
  out.jitter_events = mode.jitter_events;
  out.b_diag = std::move(mode.b_diag);
  detail::jittered_llt_into(ws.llt, ws.H, cfg, out.jitter_events, ws.scratch);
  Eigen::MatrixXd sigma =
      ws.llt.solve(Eigen::MatrixXd::Identity(ws.H.rows(), ws.H.cols()));
  out.sigma = 0.5 * (sigma + sigma.transpose());
  out.w_hat = std::move(mode.w_hat);
  return out;
}

inline PosteriorState irls_posterior(const DesignMatrix& design,
                                     const std::vector<int>& t,
                                     const RvmHyper& hyper,
                                     const TrainerSettings& cfg = {}) {
  return irls_posterior(design.values, t, hyper.alpha, cfg);
}

/// alpha_i <- (1 - alpha_i * sigma_ii) / w_i^2 over the active entries of
/// `hyper`; non-finite, non-positive, or above-threshold results prune the
/// basis (+infinity). `sigma_diag` holds the posterior variances of the
/// active bases.
inline RvmHyper update_alphas(const Vector& w_hat, const Vector& sigma_diag,
                              const RvmHyper& hyper,
                              double prune_threshold = 1e9) {
  const auto active = hyper.active();
  if (w_hat.size() != static_cast<Eigen::Index>(active.size()) ||
      sigma_diag.size() != w_hat.size())
    throw std::invalid_argument("update_alphas: dimension mismatch over active set");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  RvmHyper out = hyper;
  for (std::size_t j = 0; j < active.size(); ++j) {
    const double a = hyper.alpha(active[j]);
    const double quality = 1.0 - a * sigma_diag(static_cast<Eigen::Index>(j));
    const double w2 = w_hat(static_cast<Eigen::Index>(j)) *
                      w_hat(static_cast<Eigen::Index>(j));
    const double next = quality / w2;
    out.alpha(active[j]) =
        (std::isfinite(next) && next > 0.0 && next <= prune_threshold) ? next
                                                                       : kInf;
  }
  return out;
}

inline RvmHyper update_alphas(const Vector& w_hat, const Eigen::MatrixXd& sigma,
                              const RvmHyper& hyper,
                              double prune_threshold = 1e9) {
  if (sigma.rows() != sigma.cols())
    throw std::invalid_argument("update_alphas: sigma must be square");
  return update_alphas(w_hat, Vector(sigma.diagonal()), hyper, prune_threshold);
}

/// Alternates the Laplace mode with alpha re-estimation, removing pruned
/// bases each outer iteration, until the alphas stop moving.
inline std::pair<RvmModel, TrainReport> train_rvm(const DesignMatrix& design,
                                                  const std::vector<int>& t,
                                                  const TrainerSettings& cfg = {}) {
  const Eigen::Index m_all = design.values.cols();
  if (design.values.rows() < 1 || m_all < 1)
    throw std::invalid_argument("train_rvm: empty design");
  detail::check_binary_targets(t);
  {
    int ones = 0;
    for (int v : t) ones += v;
    if (ones == 0 || ones == static_cast<int>(t.size()))
      throw std::invalid_argument("train_rvm: targets contain a single class");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();

  RvmHyper hyper{Vector::Constant(m_all, cfg.alpha_init)};
  std::vector<Eigen::Index> active = hyper.active();
  Vector warm = Vector::Zero(m_all);
  TrainReport report;

  Eigen::MatrixXd sub;
  Vector alpha_active, warm_active, sigma_diag, lcol;
  auto gather_design = [&](const std::vector<Eigen::Index>& idx) {
    sub.resize(design.values.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      sub.col(static_cast<Eigen::Index>(j)) = design.values.col(idx[j]);
  };
  auto gather = [&](Vector& out, const Vector& full,
                    const std::vector<Eigen::Index>& idx) {
    out.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      out(static_cast<Eigen::Index>(j)) = full(idx[j]);
  };

  detail::IrlsWorkspace ws;
  detail::IrlsMode post;
  bool active_changed = true;
  for (int outer = 1; outer <= cfg.outer_max; ++outer) {
    // Pruning only ever shrinks the active set, so the gathered design is
    // still valid while no basis was dropped.
    if (active_changed) gather_design(active);
    gather(alpha_active, hyper.alpha, active);
    gather(warm_active, warm, active);
    post = detail::irls_mode(sub, t, alpha_active, cfg, &warm_active, ws);
    report.jitter_events += post.jitter_events;

    // Only the posterior variances feed the re-estimation, so invert just
    // far enough for the diagonal: diag(H^-1)_j is the squared norm of
    // L^-1 e_j, one short forward substitution per column.
    detail::jittered_chol_into(ws.chol, ws.H, cfg, report.jitter_events);
    const Eigen::Index ma = ws.H.rows();
    const Eigen::MatrixXd& factor = ws.chol;
    sigma_diag.resize(ma);
    lcol.resize(ma);
    for (Eigen::Index j = 0; j < ma; ++j) {
      auto seg = lcol.head(ma - j);
      seg.setZero();
      seg(0) = 1.0;
      factor.bottomRightCorner(ma - j, ma - j)
          .triangularView<Eigen::Lower>()
          .solveInPlace(seg);
      sigma_diag(j) = seg.squaredNorm();
    }

    RvmHyper next = update_alphas(post.w_hat, sigma_diag, hyper, cfg.prune_threshold);
    // The bias is exempt from pruning while anything else could survive.
    if (design.has_bias &&
        (!std::isfinite(next.alpha(0)) || next.alpha(0) > cfg.prune_threshold))
      next.alpha(0) = cfg.prune_threshold;

    std::vector<Eigen::Index> survivors;
    double delta = 0.0;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const Eigen::Index i = active[j];
      if (!std::isfinite(next.alpha(i))) continue;
      survivors.push_back(i);
      delta = std::max(delta,
                       std::abs(std::log(next.alpha(i)) - std::log(hyper.alpha(i))));
      warm(i) = post.w_hat(static_cast<Eigen::Index>(j));
    }
    report.outer_iterations = outer;

    if (survivors.empty()) {
      // Degenerate fallback: keep the bias slot at the prune threshold.
      next.alpha.setConstant(kInf);
      next.alpha(0) = cfg.prune_threshold;
      survivors.push_back(0);
      warm(0) = 0.0;
      hyper = std::move(next);
      active = std::move(survivors);
      report.active_counts.push_back(static_cast<int>(active.size()));
      report.converged = true;
      break;
    }

    active_changed = survivors.size() != active.size();
    hyper = std::move(next);
    active = std::move(survivors);
    report.active_counts.push_back(static_cast<int>(active.size()));
    if (delta < cfg.alpha_tol) {
      report.converged = true;
      break;
    }
  }

  // One more mode fit so the reported weights match the final alphas.
  gather_design(active);
  gather(alpha_active, hyper.alpha, active);
  gather(warm_active, warm, active);
  post = detail::irls_mode(sub, t, alpha_active, cfg, &warm_active, ws);
  report.jitter_events += post.jitter_events;
  report.final_active = static_cast<int>(active.size());

  RvmModel model;
  model.active = active;
  model.weights = post.w_hat;
  model.alpha_final = alpha_active;
  model.gamma = cfg.gamma;
  model.has_bias = design.has_bias;
  return {std::move(model), std::move(report)};
}

/// sigmoid(w_bias + sum_i w_i kappa_i); `kappa` holds the kernel values of
/// the active non-bias bases, in model order.
inline double predict_prob(const RvmModel& model, const Vector& kappa) {
  if (kappa.size() != model.relevance_count())
    throw std::invalid_argument("predict_prob: kappa length mismatch");
  double z = 0.0;
  Eigen::Index j = 0;
  for (std::size_t a = 0; a < model.active.size(); ++a) {
    if (model.has_bias && model.active[a] == 0)
      z += model.weights(static_cast<Eigen::Index>(a));
    else
      z += model.weights(static_cast<Eigen::Index>(a)) * kappa(j++);
  }
  return sigmoid(z);
}

/// Diagnostic prior variance sum_m alpha_m^-1 phi_m(x)^2 over active bases
/// (phi = 1 for the bias). Decays to the bias-only level away from all
/// relevance-vector centers.
inline double prior_variance_profile(const RvmModel& model,
                                     const Eigen::Ref<const Eigen::RowVectorXd>& x,
                                     const RowMatrix& rv_rows) {
  if (model.active.empty())
    throw std::invalid_argument("prior_variance_profile: empty model");
  if (rv_rows.rows() != model.relevance_count())
    throw std::invalid_argument("prior_variance_profile: rv_rows mismatch");
  double total = 0.0;
  Eigen::Index j = 0;
  for (std::size_t a = 0; a < model.active.size(); ++a) {
    const double inv_alpha = 1.0 / model.alpha_final(static_cast<Eigen::Index>(a));
    if (model.has_bias && model.active[a] == 0) {
      total += inv_alpha;
    } else {
      const double phi = gaussian_kernel(x, rv_rows.row(j++), model.gamma);
      total += inv_alpha * phi * phi;
    }
  }
  return total;
}

}  // namespace lrvm

#endif  // LRVM_RVM_HPP_
