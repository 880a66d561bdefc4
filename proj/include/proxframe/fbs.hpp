#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "proxframe/errors.hpp"
#include "proxframe/exact_prox.hpp"
#include "proxframe/frame.hpp"

namespace proxframe {

/// Linear measurement model K x = f with the spectral norm of K cached.
struct ForwardModel {
  Eigen::MatrixXd k;
  Eigen::VectorXd f;
  double spectral_norm_k = 0.0;
};

/// Validates dimensions and finiteness and computes the spectral norm.
ForwardModel make_forward_model(Eigen::MatrixXd k, Eigen::VectorXd f);

/// The prox-like half of the splitting iteration. Either the frame soft
/// shrinkage (requires a full-rank frame) or an exact analysis-l1 prox
/// (accepts any analysis operator, including the rank-deficient TV matrix).
class BackwardStep {
 public:
  static BackwardStep frame_shrink(FrameXd frame, double gamma);
  static BackwardStep exact_prox(Eigen::MatrixXd t, double gamma, ProxSolverConfig cfg = {});
  static BackwardStep exact_prox(Eigen::SparseMatrix<double> t, double gamma,
                                 ProxSolverConfig cfg = {});

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const { return apply_(y); }
  /// True when ||T x||_1 is available, i.e. for the exact-prox kinds.
  bool has_objective() const { return static_cast<bool>(penalty_); }
  /// ||T x||_1 for the exact-prox kinds.
  double analysis_l1(const Eigen::VectorXd& x) const { return penalty_(x); }
  double gamma() const { return gamma_; }
  Eigen::Index dim() const { return dim_; }
  const std::string& description() const { return description_; }

 private:
  BackwardStep() = default;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_;
  std::function<double(const Eigen::VectorXd&)> penalty_;
  double gamma_ = 0.0;
  Eigen::Index dim_ = 0;
  std::string description_;
};

/// Per-iteration record of a splitting run. The objective column is filled
/// only for backward steps that expose one (the exact-prox kinds); it is
/// 1/2 ||K x - f||^2 + (gamma/lambda) ||T x||_1.
struct FbsTrace {
  std::vector<double> iterate_norm_change;
  std::vector<double> objective;
  bool converged = false;
  long iterations = 0;
};

/// Forward-backward splitting failed to converge; the trace travels along.
class FbsNoConvergenceError : public NoConvergenceError {
 public:
  FbsNoConvergenceError(const std::string& what, Eigen::VectorXd best, double residual,
                        long iterations, FbsTrace trace)
      : NoConvergenceError(what, std::move(best), residual, iterations),
        trace_(std::move(trace)) {}

  const FbsTrace& trace() const { return trace_; }

 private:
  FbsTrace trace_;
};

/// Forward-backward splitting: alternates the affine gradient step
/// y = (I - lambda K*K) x + lambda K* f with the chosen backward operator
/// until the iterate change drops below tol * (1 + ||x||_2). The step size
/// must lie in the open window (0, 2/||K||_2^2).
std::pair<Eigen::VectorXd, FbsTrace> fbs_solve(const ForwardModel& model, double lambda,
                                               const BackwardStep& backward, double tol,
                                               long max_iters, Eigen::VectorXd x0);

}  // namespace proxframe
