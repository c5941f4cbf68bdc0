// Bivariate polynomials in (dx, dt) of bounded total degree, stored as dense
// coefficient vectors over a fixed monomial ordering.

#ifndef GASNET_POLYNOMIAL_HPP
#define GASNET_POLYNOMIAL_HPP

#include <Eigen/Dense>
#include <cassert>

namespace gasnet {

/// Monomials dx^n dt^j with n + j <= M, ordered by total degree m = n + j and
/// then by n. Index 0 is the constant term; index(n, j) = m(m+1)/2 + n.
class MonomialBasis {
public:
  explicit MonomialBasis(int M) : M_(M) { assert(M >= 0); }

  int order() const { return M_; }
  int size() const { return (M_ + 1) * (M_ + 2) / 2; }

  int index(int n, int j) const {
    const int m = n + j;
    if (n < 0 || j < 0 || m > M_) return -1;
    return m * (m + 1) / 2 + n;
  }

  int degree(int k) const {
    int m = 0;
    while ((m + 1) * (m + 2) / 2 <= k) ++m;
    return m;
  }
  int x_power(int k) const {
    const int m = degree(k);
    return k - m * (m + 1) / 2;
  }
  int t_power(int k) const { return degree(k) - x_power(k); }

private:
  int M_;
};

template <typename Scalar>
using CoeffVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Nested Horner evaluation: sum_n dx^n (sum_j c[n][j] dt^j).
template <typename Derived>
typename Derived::Scalar evaluate(const MonomialBasis& basis,
                                  const Eigen::MatrixBase<Derived>& c,
                                  typename Derived::Scalar dx,
                                  typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const int M = basis.order();
  Scalar outer(0);
  for (int n = M; n >= 0; --n) {
    Scalar inner(0);
    for (int j = M - n; j >= 0; --j) inner = inner * dt + c(basis.index(n, j));
    outer = outer * dx + inner;
  }
  return outer;
}

/// Univariate Horner evaluation of ascending-power coefficients.
template <typename Derived>
typename Derived::Scalar evaluate_univariate(const Eigen::MatrixBase<Derived>& c,
                                             typename Derived::Scalar x) {
  using Scalar = typename Derived::Scalar;
  Scalar acc(0);
  for (Eigen::Index n = c.size() - 1; n >= 0; --n) acc = acc * x + c(n);
  return acc;
}

/// d/d(dt); the result lives in the same basis with top-degree terms zero.
template <typename Derived>
CoeffVector<typename Derived::Scalar> derivative_t(const MonomialBasis& basis,
                                                   const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  CoeffVector<Scalar> out = CoeffVector<Scalar>::Zero(basis.size());
  const int M = basis.order();
  for (int n = 0; n <= M; ++n)
    for (int j = 1; n + j <= M; ++j)
      out(basis.index(n, j - 1)) = Scalar(j) * c(basis.index(n, j));
  return out;
}

/// d/d(dx); same conventions as derivative_t.
template <typename Derived>
CoeffVector<typename Derived::Scalar> derivative_x(const MonomialBasis& basis,
                                                   const Eigen::MatrixBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  CoeffVector<Scalar> out = CoeffVector<Scalar>::Zero(basis.size());
  const int M = basis.order();
  for (int n = 1; n <= M; ++n)
    for (int j = 0; n + j <= M; ++j)
      out(basis.index(n - 1, j)) = Scalar(n) * c(basis.index(n, j));
  return out;
}

/// Product of two polynomials keeping only monomials of total degree
/// <= max_degree (which must not exceed the basis order).
template <typename DerivedA, typename DerivedB>
CoeffVector<typename DerivedA::Scalar> multiply_truncated(
    const MonomialBasis& basis, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b, int max_degree) {
  using Scalar = typename DerivedA::Scalar;
  CoeffVector<Scalar> out = CoeffVector<Scalar>::Zero(basis.size());
  const int last = (max_degree + 1) * (max_degree + 2) / 2;
  for (int ka = 0; ka < last; ++ka) {
    if (a(ka) == Scalar(0)) continue;
    const int na = basis.x_power(ka), ja = basis.t_power(ka);
    for (int kb = 0; kb < last; ++kb) {
      const int n = na + basis.x_power(kb), j = ja + basis.t_power(kb);
      if (n + j > max_degree) continue;
      out(basis.index(n, j)) += a(ka) * b(kb);
    }
  }
  return out;
}

}  // namespace gasnet

#endif  // GASNET_POLYNOMIAL_HPP
