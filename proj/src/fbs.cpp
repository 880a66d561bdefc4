#include "proxframe/fbs.hpp"

#include <cmath>
#include <memory>

#include "proxframe/shrinkage.hpp"

namespace proxframe {

ForwardModel make_forward_model(Eigen::MatrixXd k, Eigen::VectorXd f) {
  if (k.rows() != f.size())
    throw LengthError("forward model: K has " + std::to_string(k.rows()) +
                      " rows but f has length " + std::to_string(f.size()));
  if (!k.allFinite() || !f.allFinite())
    throw NonFiniteError("forward model: K or f is not finite");
  ForwardModel model;
  model.spectral_norm_k = largest_singular_value(k);
  model.k = std::move(k);
  model.f = std::move(f);
  return model;
}

BackwardStep BackwardStep::frame_shrink(FrameXd frame, double gamma) {
  ShrinkConfig{gamma}.validate();
  BackwardStep step;
  step.gamma_ = gamma;
  step.dim_ = frame.cols();
  step.description_ = "frame_shrink(L=" + std::to_string(frame.rows()) +
                      ",N=" + std::to_string(frame.cols()) + ",gamma=" + std::to_string(gamma) + ")";
  auto shared = std::make_shared<const FrameXd>(std::move(frame));
  step.apply_ = [shared, gamma](const Eigen::VectorXd& y) {
    return frame_soft_shrink(*shared, ShrinkConfig{gamma}, y);
  };
  return step;
}

BackwardStep BackwardStep::exact_prox(Eigen::MatrixXd t, double gamma, ProxSolverConfig cfg) {
  ShrinkConfig{gamma}.validate();
  BackwardStep step;
  step.gamma_ = gamma;
  step.dim_ = t.cols();
  step.description_ = "exact_prox(L=" + std::to_string(t.rows()) +
                      ",N=" + std::to_string(t.cols()) + ",gamma=" + std::to_string(gamma) + ")";
  if (cfg.spectral_norm_hint <= 0.0) cfg.spectral_norm_hint = largest_singular_value(t);
  auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(t));
  step.apply_ = [shared, gamma, cfg](const Eigen::VectorXd& y) {
    return ::proxframe::exact_prox(*shared, gamma, y, cfg).minimizer;
  };
  step.penalty_ = [shared](const Eigen::VectorXd& x) {
    return (*shared * x).cwiseAbs().sum();
  };
  return step;
}

BackwardStep BackwardStep::exact_prox(Eigen::SparseMatrix<double> t, double gamma,
                                      ProxSolverConfig cfg) {
  ShrinkConfig{gamma}.validate();
  BackwardStep step;
  step.gamma_ = gamma;
  step.dim_ = t.cols();
  step.description_ = "exact_prox(sparse,L=" + std::to_string(t.rows()) +
                      ",N=" + std::to_string(t.cols()) + ",gamma=" + std::to_string(gamma) + ")";
  if (cfg.spectral_norm_hint <= 0.0) cfg.spectral_norm_hint = largest_singular_value(t);
  auto shared = std::make_shared<const Eigen::SparseMatrix<double>>(std::move(t));
  step.apply_ = [shared, gamma, cfg](const Eigen::VectorXd& y) {
    return ::proxframe::exact_prox(*shared, gamma, y, cfg).minimizer;
  };
  step.penalty_ = [shared](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(*shared * x).cwiseAbs().sum();
  };
  return step;
}

std::pair<Eigen::VectorXd, FbsTrace> fbs_solve(const ForwardModel& model, double lambda,
                                               const BackwardStep& backward, double tol,
                                               long max_iters, Eigen::VectorXd x0) {
  const Eigen::Index n = model.k.cols();
  const double window = 2.0 / (model.spectral_norm_k * model.spectral_norm_k);
  if (!(lambda > 0.0) || !(lambda < window))
    throw StepSizeError("fbs_solve: lambda must lie in the open window (0, " +
                        std::to_string(window) + "), got " + std::to_string(lambda));
  if (backward.dim() != n)
    throw LengthError("fbs_solve: backward step dimension does not match K");
  if (x0.size() != n) throw LengthError("fbs_solve: x0 has the wrong length");
  if (!x0.allFinite()) throw NonFiniteError("fbs_solve: x0 is not finite");
  if (!(tol > 0.0) || max_iters < 1)
    throw DomainError("fbs_solve: tol must be > 0 and max_iters positive");

  // Forward step as one precomputed affine map, y = B x + c.
  const Eigen::MatrixXd b =
      Eigen::MatrixXd::Identity(n, n) - lambda * (model.k.transpose() * model.k);
  const Eigen::VectorXd c = lambda * (model.k.transpose() * model.f);

  FbsTrace trace;
  Eigen::VectorXd x = std::move(x0);
  for (long j = 0; j < max_iters; ++j) {
    const Eigen::VectorXd y = b * x + c;
    Eigen::VectorXd xn = backward.apply(y);
    const double change = (xn - x).norm();
    trace.iterate_norm_change.push_back(change);
    if (backward.has_objective())
      trace.objective.push_back(0.5 * (model.k * xn - model.f).squaredNorm() +
                                backward.gamma() / lambda * backward.analysis_l1(xn));
    const bool done = change <= tol * (1.0 + x.norm());
    x.swap(xn);
    trace.iterations = j + 1;
    if (done) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged) {
    const double last = trace.iterate_norm_change.back();
    throw FbsNoConvergenceError("fbs_solve: iterate change " + std::to_string(last) +
                                    " above tolerance after " +
                                    std::to_string(trace.iterations) + " iterations",
                                x, last, trace.iterations, trace);
  }
  return {std::move(x), std::move(trace)};
}

}  // namespace proxframe
