#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "fedpex/errors.hpp"

namespace fedpex::linalg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Cholesky factor of a symmetric positive definite matrix, reusable across
/// solves, log-determinants and quadratic forms.
template <typename Scalar>
class SpdFactor {
 public:
  template <typename Derived>
  explicit SpdFactor(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) throw ParameterError("matrix must be square");
    llt_.compute(a);
    const Scalar floor = Scalar(1e-14) * a.trace();
    if (llt_.info() != Eigen::Success) throw NotPositiveDefinite("Cholesky failed");
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      // Pivot of A is L_ii^2.
      if (!(l(i, i) * l(i, i) > floor)) throw NotPositiveDefinite("non-positive pivot");
    }
  }

  Eigen::Index dim() const { return llt_.matrixLLT().rows(); }

  Matrix<Scalar> lower() const { return llt_.matrixL(); }

  template <typename Derived>
  Vector<Scalar> solve(const Eigen::MatrixBase<Derived>& b) const {
    if (b.size() != dim()) throw ParameterError("dimension mismatch in solve");
    return llt_.solve(b);
  }

  Scalar logdet() const {
    const auto& l = llt_.matrixLLT();
    Scalar acc(0);
    for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
    return Scalar(2) * acc;
  }

  /// y' A^{-1} y, computed as ||L^{-1} y||^2.
  template <typename Derived>
  Scalar quad_form_inv(const Eigen::MatrixBase<Derived>& y) const {
    if (y.size() != dim()) throw ParameterError("dimension mismatch in quadratic form");
    const Vector<Scalar> z = llt_.matrixL().solve(y);
    return z.squaredNorm();
  }

 private:
  Eigen::LLT<Matrix<Scalar>> llt_;
};

template <typename Derived>
SpdFactor(const Eigen::MatrixBase<Derived>&) -> SpdFactor<typename Derived::Scalar>;

template <typename Derived>
Matrix<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& a) {
  return SpdFactor(a).lower();
}

template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> solve(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  return SpdFactor(a).solve(b);
}

template <typename Derived>
typename Derived::Scalar logdet(const Eigen::MatrixBase<Derived>& a) {
  return SpdFactor(a).logdet();
}

template <typename DerivedA, typename DerivedY>
typename DerivedA::Scalar quad_form_inv(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedY>& y) {
  return SpdFactor(a).quad_form_inv(y);
}

}  // namespace fedpex::linalg
