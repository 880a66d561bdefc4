#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "proxframe/errors.hpp"
#include "proxframe/frame.hpp"
#include "proxframe/report.hpp"
#include "proxframe/shrinkage.hpp"

namespace proxframe {

/// Controls the relaxed fixed-point iteration used to materialize a
/// subgradient element. The tolerance is on the T-norm of the fixed-point
/// residual.
struct FixedPointConfig {
  double beta = 0.5;
  double tol = 1e-11;
  long max_iters = 100000;

  void validate() const {
    if (!(beta > 0.0) || !(beta < 1.0))
      throw DomainError("relaxation weight beta must lie in (0, 1)");
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw DomainError("fixed-point tolerance must be finite and > 0");
    if (max_iters < 1) throw DomainError("max_iters must be positive");
  }
};

/// One element y of the subgradient set at x, together with the fixed point
/// t = x + y of the map t -> x + (I - T^+ S_gamma T) t that produced it.
/// The defining identity is frame_soft_shrink(x + y) = x.
struct SubgradientElement {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd t;
  double residual = 0.0;  // T-norm of t - (x + (I - T^+ S_gamma T) t)
  long iterations = 0;
};

/// Materializes one subgradient element at x by the relaxed iteration
/// t <- (1 - beta) t + beta (x + (I - T^+ S_gamma T) t), started at t = x.
///
/// The iterated map is nonexpansive in the T-norm and its fixed-point set is
/// nonempty and contained in the T-norm ball of radius gamma*sqrt(L) around
/// x, so the averaged iteration converges. Where the subgradient set is
/// multi-valued the returned element depends on beta and on the start point;
/// callers should only rely on membership properties.
inline SubgradientElement subgradient_element(const FrameXd& frame, ShrinkConfig cfg,
                                              const Eigen::VectorXd& x,
                                              FixedPointConfig fp = {}) {
  cfg.validate();
  fp.validate();
  detail::check_vector(frame, x, frame.cols(), "subgradient_element");
  if (!x.allFinite()) throw NonFiniteError("subgradient_element: x is not finite");

  Eigen::VectorXd t = x;
  Eigen::VectorXd best = t;
  double best_residual = std::numeric_limits<double>::infinity();
  long iter = 0;
  for (; iter <= fp.max_iters; ++iter) {
    const Eigen::VectorXd ft = x + t - frame_soft_shrink(frame, cfg, t);
    const double residual = t_norm(frame, Eigen::VectorXd(t - ft));
    if (residual < best_residual) {
      best_residual = residual;
      best = t;
    }
    if (residual <= fp.tol) {
      SubgradientElement el;
      el.x = x;
      el.t = t;
      el.y = t - x;
      el.residual = residual;
      el.iterations = iter;
      return el;
    }
    if (iter == fp.max_iters) break;
    t = (1.0 - fp.beta) * t + fp.beta * ft;
  }
  throw NoConvergenceError(
      "fixed-point iteration did not reach tolerance " + std::to_string(fp.tol) +
          " within " + std::to_string(fp.max_iters) + " iterations",
      best - x, best_residual, iter);
}

/// Membership test for the subgradient set at 0: operationally, y belongs
/// iff the frame shrinkage maps y to zero; analytically, iff
/// ||T y||_inf <= gamma. Both routes are evaluated and must agree whenever
/// ||T y||_inf is farther than 1e-9 from gamma, otherwise a ConsistencyError
/// is raised. Returns the operational verdict.
inline bool zero_subgradient_contains(const FrameXd& frame, ShrinkConfig cfg,
                                      const Eigen::VectorXd& y) {
  cfg.validate();
  detail::check_vector(frame, y, frame.cols(), "zero_subgradient_contains");
  const double zero_tol = 1e-10 * (1.0 + y.norm());
  const bool operational =
      frame_soft_shrink(frame, cfg, y).lpNorm<Eigen::Infinity>() <= zero_tol;
  const double tmax = apply(frame, y).lpNorm<Eigen::Infinity>();
  const bool analytic = tmax <= cfg.gamma;
  if (operational != analytic && std::abs(tmax - cfg.gamma) > 1e-9)
    throw ConsistencyError(
        "zero-subgradient membership: operational and analytic criteria disagree "
        "(||Ty||_inf = " + std::to_string(tmax) + ", gamma = " +
        std::to_string(cfg.gamma) + ")");
  return operational;
}

/// True iff every component of T x has modulus strictly greater than
/// gamma * (||T T^+||_inf + 1), the region on which the subgradient set is a
/// singleton with closed form gamma * T^+ sign(T x).
inline bool in_single_valued_region(const FrameXd& frame, ShrinkConfig cfg,
                                    const Eigen::VectorXd& x) {
  cfg.validate();
  detail::check_vector(frame, x, frame.cols(), "in_single_valued_region");
  const double threshold = cfg.gamma * (frame.rowsum_norm() + 1.0);
  return apply(frame, x).cwiseAbs().minCoeff() > threshold;
}

/// gamma * T^+ sign(T x), valid on the single-valued region only.
inline Eigen::VectorXd single_valued_subgradient(const FrameXd& frame, ShrinkConfig cfg,
                                                 const Eigen::VectorXd& x) {
  if (!in_single_valued_region(frame, cfg, x))
    throw RegionError("point is outside the single-valued region");
  const Eigen::VectorXd tx = apply(frame, x);
  Eigen::VectorXd sgn(tx.size());
  for (Eigen::Index j = 0; j < tx.size(); ++j) sgn(j) = tx(j) > 0.0 ? 1.0 : -1.0;
  return cfg.gamma * pinv_apply(frame, sgn);
}

/// Firm nonexpansiveness slack of the frame shrinkage P at the pair (x, y):
/// measured = ||Px - Py||_T^2 + ||(x - Px) - (y - Py)||_T^2 - ||x - y||_T^2,
/// bound = 1e-9 * (1 + ||x - y||_T^2).
inline PropertyReport firm_nonexpansive_check(const FrameXd& frame, ShrinkConfig cfg,
                                              const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& y) {
  cfg.validate();
  detail::check_vector(frame, x, frame.cols(), "firm_nonexpansive_check");
  detail::check_vector(frame, y, frame.cols(), "firm_nonexpansive_check");
  const Eigen::VectorXd px = frame_soft_shrink(frame, cfg, x);
  const Eigen::VectorXd py = frame_soft_shrink(frame, cfg, y);
  const double a = t_norm(frame, Eigen::VectorXd(px - py));
  const double b = t_norm(frame, Eigen::VectorXd((x - px) - (y - py)));
  const double d = t_norm(frame, Eigen::VectorXd(x - y));
  const double measured = a * a + b * b - d * d;
  const double bound = 1e-9 * (1.0 + d * d);
  return make_report("firm_nonexpansive", measured, bound, 1,
                     {{"tnorm_diff", d}, {"tnorm_shrink_diff", a}});
}

/// Cyclic monotonicity slack over one cycle of base points. For each point a
/// subgradient element is materialized and the cyclic sum
/// A = sum_i <x_{i+1} - x_i, y_i>_T is accumulated (wrapping around);
/// measured = A, bound = 1e-8 * (1 + max_i ||x_i||_T * max_i ||y_i||_T).
inline PropertyReport cyclic_monotonicity_check(const FrameXd& frame, ShrinkConfig cfg,
                                                const std::vector<Eigen::VectorXd>& points,
                                                FixedPointConfig fp = {}) {
  if (points.size() < 2)
    throw DomainError("cyclic monotonicity needs at least 2 points");
  const std::size_t m = points.size();
  std::vector<Eigen::VectorXd> ys(m);
  double max_tx = 0.0, max_ty = 0.0, max_euclid_ratio = 0.0;
  double max_ball_slack = -std::numeric_limits<double>::infinity();
  const double ball = cfg.gamma * std::sqrt(static_cast<double>(frame.rows()));
  for (std::size_t i = 0; i < m; ++i) {
    ys[i] = subgradient_element(frame, cfg, points[i], fp).y;
    max_tx = std::max(max_tx, t_norm(frame, points[i]));
    const double ty = t_norm(frame, ys[i]);
    max_ty = std::max(max_ty, ty);
    max_ball_slack = std::max(max_ball_slack, ty - ball);
    max_euclid_ratio =
        std::max(max_euclid_ratio, ys[i].norm() / (ball * frame.spectral_norm()));
  }
  double cycle_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t next = (i + 1) % m;
    cycle_sum += t_inner(frame, Eigen::VectorXd(points[next] - points[i]), ys[i]);
  }
  const double bound = 1e-8 * (1.0 + max_tx * max_ty);
  return make_report("cyclic_monotonicity", cycle_sum, bound,
                     static_cast<long>(m),
                     {{"max_tnorm_x", max_tx},
                      {"max_tnorm_y", max_ty},
                      {"max_ball_slack", max_ball_slack},
                      {"max_euclid_ratio", max_euclid_ratio}});
}

}  // namespace proxframe
