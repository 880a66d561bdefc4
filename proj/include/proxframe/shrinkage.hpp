#pragma once

#include <cmath>

#include <Eigen/Core>

#include "proxframe/errors.hpp"
#include "proxframe/frame.hpp"

namespace proxframe {

/// Threshold for the soft shrinkage operators.
struct ShrinkConfig {
  double gamma;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw DomainError("shrinkage threshold gamma must be finite and > 0");
  }
};

/// Componentwise soft shrinkage: z_j -> z_j - gamma for z_j >= gamma,
/// z_j + gamma for z_j <= -gamma, and 0 on the dead zone in between.
/// Components with |z_j| == gamma map to exactly 0.
template <class Derived>
typename Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> soft_shrink(
    const Eigen::MatrixBase<Derived>& z, ShrinkConfig cfg) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  if (z.cols() != 1) throw LengthError("soft_shrink expects a column vector");
  if (!z.allFinite()) throw NonFiniteError("soft_shrink input contains NaN or infinity");
  const Scalar gamma = static_cast<Scalar>(cfg.gamma);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = z.derived();
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const Scalar v = out(j);
    out(j) = v >= gamma ? v - gamma : (v <= -gamma ? v + gamma : Scalar(0));
  }
  return out;
}

/// Frame soft shrinkage T^+ S_gamma T.
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector frame_soft_shrink(const Frame<Scalar>& frame,
                                                 ShrinkConfig cfg,
                                                 const Eigen::MatrixBase<Derived>& z) {
  detail::check_vector(frame, z, frame.cols(), "frame_soft_shrink");
  return pinv_apply(frame, soft_shrink(apply(frame, z), cfg));
}

/// (I - T^+ S_gamma T) z, the part the frame shrinkage removes.
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector residual_shrink(const Frame<Scalar>& frame,
                                               ShrinkConfig cfg,
                                               const Eigen::MatrixBase<Derived>& z) {
  detail::check_vector(frame, z, frame.cols(), "residual_shrink");
  return z.derived() - frame_soft_shrink(frame, cfg, z);
}

}  // namespace proxframe
