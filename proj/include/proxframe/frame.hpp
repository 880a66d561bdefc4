#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "proxframe/errors.hpp"

namespace proxframe {

/// Relative cutoff below which a trailing singular value counts as zero.
struct RankTolerance {
  double value = 1e-10;

  void validate() const {
    if (!(value > 0.0) || !(value < 1.0))
      throw DomainError("rank tolerance must lie strictly between 0 and 1");
  }
};

/// A tall analysis operator T in R^{L x N}, L >= N, with full column rank.
///
/// The matrix is validated and factorized (SVD) once at construction; all
/// derived quantities -- pseudo-inverse action, range projector, spectral
/// data, the row-sum norm of T T^+ -- are served from the cached factors.
/// Instances are immutable and safe to share across threads.
template <class Scalar>
class Frame {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Frame(Matrix entries, RankTolerance tol = {}) : entries_(std::move(entries)) {
    tol.validate();
    if (entries_.rows() < entries_.cols() || entries_.cols() < 1)
      throw ShapeError("frame matrix must be L x N with L >= N >= 1, got " +
                       std::to_string(entries_.rows()) + " x " +
                       std::to_string(entries_.cols()));
    if (!entries_.allFinite())
      throw NonFiniteError("frame matrix contains NaN or infinite entries");

    Eigen::BDCSVD<Matrix> svd(entries_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma_ = svd.singularValues();
    if (!(sigma_(sigma_.size() - 1) > tol.value * sigma_(0)))
      throw RankError("frame matrix is numerically rank deficient: sigma_min = " +
                      std::to_string(static_cast<double>(sigma_(sigma_.size() - 1))) +
                      ", sigma_max = " + std::to_string(static_cast<double>(sigma_(0))));
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    // T T^+ = U U^T; its infinity norm is the exact maximum absolute row sum.
    rowsum_norm_ = (u_ * u_.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Matrix& matrix() const { return entries_; }

  /// Singular values of T, nonincreasing, all strictly positive.
  const Vector& singular_values() const { return sigma_; }
  Scalar spectral_norm() const { return sigma_(0); }
  Scalar sigma_min() const { return sigma_(sigma_.size() - 1); }
  /// ||T T^+||_inf, the row-sum norm of the range projector.
  Scalar rowsum_norm() const { return rowsum_norm_; }

  /// Thin SVD factors, exposed for the free operator functions below.
  const Matrix& factor_u() const { return u_; }
  const Matrix& factor_v() const { return v_; }

 private:
  Matrix entries_;
  Matrix u_, v_;
  Vector sigma_;
  Scalar rowsum_norm_ = 0;
};

using FrameXd = Frame<double>;

namespace detail {

template <class Scalar, class Derived>
void check_vector(const Frame<Scalar>& frame, const Eigen::MatrixBase<Derived>& z,
                  Eigen::Index expected, const char* what) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                "scalar type of vector must match the frame");
  (void)frame;
  if (z.cols() != 1 || z.rows() != expected)
    throw LengthError(std::string(what) + ": expected vector of length " +
                      std::to_string(expected) + ", got " + std::to_string(z.rows()) +
                      " x " + std::to_string(z.cols()));
}

}  // namespace detail

/// Validates entries and returns the factorized frame.
template <class Derived>
Frame<typename Derived::Scalar> build_frame(const Eigen::MatrixBase<Derived>& entries,
                                            RankTolerance tol = {}) {
  return Frame<typename Derived::Scalar>(entries.eval(), tol);
}

/// T x
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector apply(const Frame<Scalar>& frame,
                                     const Eigen::MatrixBase<Derived>& x) {
  detail::check_vector(frame, x, frame.cols(), "apply");
  return frame.matrix() * x.derived();
}

/// T* z
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector adjoint_apply(const Frame<Scalar>& frame,
                                             const Eigen::MatrixBase<Derived>& z) {
  detail::check_vector(frame, z, frame.rows(), "adjoint_apply");
  return frame.matrix().transpose() * z.derived();
}

/// T^+ z, the least-squares solution of T x = z, evaluated through the SVD.
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector pinv_apply(const Frame<Scalar>& frame,
                                          const Eigen::MatrixBase<Derived>& z) {
  detail::check_vector(frame, z, frame.rows(), "pinv_apply");
  typename Frame<Scalar>::Vector c = frame.factor_u().transpose() * z.derived();
  c.array() /= frame.singular_values().array();
  return frame.factor_v() * c;
}

/// T T^+ z, the orthogonal projection of z onto range(T).
template <class Scalar, class Derived>
typename Frame<Scalar>::Vector projector_apply(const Frame<Scalar>& frame,
                                               const Eigen::MatrixBase<Derived>& z) {
  detail::check_vector(frame, z, frame.rows(), "projector_apply");
  return frame.factor_u() * (frame.factor_u().transpose() * z.derived());
}

/// <x, y>_T = x^T (T*T) y, evaluated as <Tx, Ty>.
template <class Scalar, class D1, class D2>
Scalar t_inner(const Frame<Scalar>& frame, const Eigen::MatrixBase<D1>& x,
               const Eigen::MatrixBase<D2>& y) {
  detail::check_vector(frame, x, frame.cols(), "t_inner");
  detail::check_vector(frame, y, frame.cols(), "t_inner");
  return (frame.matrix() * x.derived()).dot(frame.matrix() * y.derived());
}

/// ||x||_T = ||T x||_2.
template <class Scalar, class Derived>
Scalar t_norm(const Frame<Scalar>& frame, const Eigen::MatrixBase<Derived>& x) {
  detail::check_vector(frame, x, frame.cols(), "t_norm");
  return (frame.matrix() * x.derived()).norm();
}

}  // namespace proxframe
