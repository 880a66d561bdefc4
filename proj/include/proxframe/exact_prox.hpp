#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "proxframe/errors.hpp"
#include "proxframe/frame.hpp"
#include "proxframe/shrinkage.hpp"

namespace proxframe {

/// Largest singular value, computed exactly for dense matrices.
inline double largest_singular_value(const Eigen::MatrixXd& t) {
  if (t.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(t).singularValues()(0);
}

/// Largest singular value of a sparse matrix via power iteration on T^T T.
inline double largest_singular_value(const Eigen::SparseMatrix<double>& t) {
  if (t.rows() == 0 || t.cols() == 0) return 0.0;
  Eigen::VectorXd v(t.cols());
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = unit(rng);
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < 20000; ++k) {
    Eigen::VectorXd w = t.transpose() * (t * v);
    const double nl = w.norm();
    if (nl == 0.0) return 0.0;
    w /= nl;
    const bool settled = k > 16 && std::abs(nl - lambda) <= 1e-14 * std::max(1.0, nl);
    lambda = nl;
    v.swap(w);
    if (settled) break;
  }
  return std::sqrt(lambda);
}

/// 1/2 ||y - x||_2^2 + gamma ||T x||_1.
template <class TMat>
double analysis_l1_objective(const TMat& t, double gamma, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& x) {
  const Eigen::VectorXd tx = t * x;
  return 0.5 * (y - x).squaredNorm() + gamma * tx.cwiseAbs().sum();
}

namespace detail {

inline Eigen::VectorXd row_transposed(const Eigen::MatrixXd& t, Eigen::Index j) {
  return t.row(j).transpose();
}

inline Eigen::VectorXd row_transposed(const Eigen::SparseMatrix<double>& t, Eigen::Index j) {
  return Eigen::VectorXd(Eigen::RowVectorXd(t.row(j)));
}

}  // namespace detail

/// Distance of 0 from the subdifferential of the analysis-l1 objective at
/// xhat: min over admissible sign vectors s of ||xhat - y + gamma T* s||_2.
/// Components of T xhat with modulus above zero_tol pin s_j = sign; the rest
/// are free in [-1, 1] and are optimized by coordinate descent on the
/// resulting box-constrained least-squares problem. A value of 0 certifies
/// that xhat minimizes 1/2 ||y - x||^2 + gamma ||T x||_1.
template <class TMat>
double kkt_certificate(const TMat& t, double gamma, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& xhat, double zero_tol) {
  if (!(zero_tol > 0.0)) throw DomainError("kkt_certificate: zero_tol must be > 0");
  if (y.size() != t.cols() || xhat.size() != t.cols())
    throw LengthError("kkt_certificate: vector lengths must equal the column count");

  const Eigen::VectorXd tx = t * xhat;
  Eigen::VectorXd v = xhat - y;
  std::vector<Eigen::Index> free_rows;
  for (Eigen::Index j = 0; j < tx.size(); ++j) {
    if (std::abs(tx(j)) > zero_tol)
      v += gamma * (tx(j) > 0.0 ? 1.0 : -1.0) * detail::row_transposed(t, j);
    else
      free_rows.push_back(j);
  }
  if (free_rows.empty()) return v.norm();

  const Eigen::Index nfree = static_cast<Eigen::Index>(free_rows.size());
  Eigen::MatrixXd a(xhat.size(), nfree);
  for (Eigen::Index k = 0; k < nfree; ++k) a.col(k) = detail::row_transposed(t, free_rows[k]);
  const Eigen::VectorXd col_sq = a.colwise().squaredNorm();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(nfree);

  for (int sweep = 0; sweep < 1000; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index k = 0; k < nfree; ++k) {
      if (col_sq(k) == 0.0) continue;
      const double proposal = s(k) - a.col(k).dot(v) / (gamma * col_sq(k));
      const double clipped = std::clamp(proposal, -1.0, 1.0);
      const double delta = clipped - s(k);
      if (delta != 0.0) {
        v += gamma * delta * a.col(k);
        s(k) = clipped;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change <= 1e-13) break;
  }
  return v.norm();
}

/// Settings for the dual projected-gradient prox solver. A nonpositive tau
/// requests the default step 1/||T||_2^2; a positive spectral_norm_hint skips
/// the (possibly expensive) norm computation. The optional observer receives
/// every primal iterate, starting with x = y.
struct ProxSolverConfig {
  double tau = 0.0;
  double tol = 1e-10;
  long max_iters = 200000;
  double spectral_norm_hint = 0.0;
  std::function<void(const Eigen::VectorXd&)> observer;

  void validate() const {
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw DomainError("prox solver tolerance must be finite and > 0");
    if (max_iters < 1) throw DomainError("prox solver max_iters must be positive");
  }
};

/// Exact proximal point of gamma ||T .||_1 together with its certificate.
struct ProxResult {
  Eigen::VectorXd minimizer;
  Eigen::VectorXd dual;  // ||dual||_inf <= gamma, and minimizer = y - T* dual
  long iterations = 0;
  double primal_obj = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
};

/// Computes prox of gamma ||T .||_1 at y, i.e. the minimizer of
/// 1/2 ||y - x||_2^2 + gamma ||T x||_1, by projected gradient on the dual:
///
///   p <- clip(p + tau T (y - T* p), [-gamma, gamma]),   x = y - T* p.
///
/// T may be rank deficient; full rank is only needed on the frame-shrinkage
/// path. Converges for any step tau in (0, 2/||T||_2^2); iteration stops when
/// the inf-norm change of the dual iterate drops below cfg.tol.
template <class TMat>
ProxResult exact_prox(const TMat& t, double gamma, const Eigen::VectorXd& y,
                      ProxSolverConfig cfg = {}) {
  cfg.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("exact_prox: gamma must be finite and > 0");
  if (y.size() != t.cols())
    throw LengthError("exact_prox: y has length " + std::to_string(y.size()) +
                      ", operator has " + std::to_string(t.cols()) + " columns");
  if (!y.allFinite()) throw NonFiniteError("exact_prox: y is not finite");

  const double snorm =
      cfg.spectral_norm_hint > 0.0 ? cfg.spectral_norm_hint : largest_singular_value(t);
  const double s2 = snorm * snorm;
  if (s2 == 0.0) {
    // Zero operator: the penalty vanishes and the prox is the identity.
    ProxResult r;
    r.minimizer = y;
    r.dual = Eigen::VectorXd::Zero(t.rows());
    r.primal_obj = 0.0;
    r.kkt_residual = 0.0;
    r.converged = true;
    return r;
  }
  const double tau = cfg.tau > 0.0 ? cfg.tau : 1.0 / s2;
  if (!(tau > 0.0) || !(tau < 2.0 / s2))
    throw StepSizeError("exact_prox: step tau must lie in (0, 2/||T||_2^2)");

  Eigen::VectorXd p = Eigen::VectorXd::Zero(t.rows());
  Eigen::VectorXd x = y;
  if (cfg.observer) cfg.observer(x);
  double change = std::numeric_limits<double>::infinity();
  long iter = 0;
  bool converged = false;
  while (iter < cfg.max_iters) {
    Eigen::VectorXd pn = p + tau * (t * x);
    change = 0.0;
    for (Eigen::Index j = 0; j < pn.size(); ++j) {
      pn(j) = std::clamp(pn(j), -gamma, gamma);
      change = std::max(change, std::abs(pn(j) - p(j)));
    }
    p.swap(pn);
    x = y - t.transpose() * p;
    ++iter;
    if (cfg.observer) cfg.observer(x);
    if (change <= cfg.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NoConvergenceError("exact_prox: dual iterate change " + std::to_string(change) +
                                 " above tolerance after " + std::to_string(iter) +
                                 " iterations",
                             x, change, iter);

  ProxResult r;
  r.minimizer = x;
  r.dual = p;
  r.iterations = iter;
  r.primal_obj = analysis_l1_objective(t, gamma, y, x);
  const Eigen::VectorXd tx = t * x;
  r.kkt_residual =
      kkt_certificate(t, gamma, y, x, 1e-6 * (1.0 + tx.lpNorm<Eigen::Infinity>()));
  r.converged = true;
  return r;
}

/// Side-by-side evaluation of the frame shrinkage against the exact prox of
/// gamma ||T .||_1 at the same input.
struct ShrinkProxComparison {
  double dist_l2 = 0.0;
  double dist_tnorm = 0.0;
  double obj_shrink = 0.0;
  double obj_prox = 0.0;
  long nnz_t_shrink = 0;
  long nnz_t_prox = 0;
  long iterations = 0;
  Eigen::VectorXd shrink_point;
  Eigen::VectorXd prox_point;
};

inline long count_above(const Eigen::VectorXd& v, double tol) {
  long n = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) > tol) ++n;
  return n;
}

inline ShrinkProxComparison compare_shrink_vs_prox(const FrameXd& frame, double gamma,
                                                   const Eigen::VectorXd& y,
                                                   ProxSolverConfig cfg = {}) {
  if (cfg.spectral_norm_hint <= 0.0) cfg.spectral_norm_hint = frame.spectral_norm();
  ShrinkProxComparison cmp;
  cmp.shrink_point = frame_soft_shrink(frame, ShrinkConfig{gamma}, y);
  ProxResult prox = exact_prox(frame.matrix(), gamma, y, cfg);
  cmp.prox_point = prox.minimizer;
  cmp.iterations = prox.iterations;
  cmp.dist_l2 = (cmp.shrink_point - cmp.prox_point).norm();
  cmp.dist_tnorm = t_norm(frame, Eigen::VectorXd(cmp.shrink_point - cmp.prox_point));
  cmp.obj_shrink = analysis_l1_objective(frame.matrix(), gamma, y, cmp.shrink_point);
  cmp.obj_prox = prox.primal_obj;
  const Eigen::VectorXd ts = apply(frame, cmp.shrink_point);
  const Eigen::VectorXd tp = apply(frame, cmp.prox_point);
  cmp.nnz_t_shrink = count_above(ts, 1e-6 * (1.0 + ts.lpNorm<Eigen::Infinity>()));
  cmp.nnz_t_prox = count_above(tp, 1e-6 * (1.0 + tp.lpNorm<Eigen::Infinity>()));
  return cmp;
}

}  // namespace proxframe
