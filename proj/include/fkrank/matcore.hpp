#pragma once

// Dense complex matrix kernel: SVD, polar, Schur (with reordering), partial
// inverse and tolerance-aware rank. Everything is templated on the real
// scalar so the same code runs in double or long double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fkrank/errors.hpp"

namespace fkrank {

using Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = ComplexMatrix<double>;
using CVector = ComplexVector<double>;
using RVector = RealVector<double>;

template <typename Derived>
using RealOf = typename Eigen::NumTraits<typename Derived::Scalar>::Real;

/// Relative rank tolerance used when none is given: n * machine epsilon.
template <typename Real = double>
Real default_rank_tol(Index n)
{
  return static_cast<Real>(n) * std::numeric_limits<Real>::epsilon();
}

/// A largest singular value at or below this makes the matrix rank 0.
inline constexpr double kRankAbsoluteFloor = 1e-300;

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& x, const char* what)
{
  if (x.rows() < 1 || x.rows() != x.cols())
    throw UsageError(std::string(what) + ": expected a non-empty square matrix");
  if (!x.allFinite())
    throw UsageError(std::string(what) + ": matrix has non-finite entries");
}

template <typename DerivedA, typename DerivedB>
void require_same_order(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                        const char* what)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw UsageError(std::string(what) + ": dimension mismatch");
}

/// tau(x) = trace(x) / n, the normalized trace of M_n.
template <typename Derived>
typename Derived::Scalar normalized_trace(const Eigen::MatrixBase<Derived>& x)
{
  using Scalar = typename Derived::Scalar;
  return x.trace() / Scalar(static_cast<RealOf<Derived>>(x.rows()));
}

inline CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

/// e_ij: one at (i, j), zero elsewhere.
inline CMatrix matrix_unit(Index n, Index i, Index j)
{
  CMatrix e = CMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// SVD

template <typename Real>
struct SvdResult {
  ComplexMatrix<Real> u;
  RealVector<Real> s;  // non-increasing
  ComplexMatrix<Real> v;

  ComplexMatrix<Real> reconstruct() const
  {
    return u * s.template cast<std::complex<Real>>().asDiagonal() * v.adjoint();
  }
};

/// Full SVD x = u diag(s) v*.
template <typename Derived>
SvdResult<RealOf<Derived>> svd(const Eigen::MatrixBase<Derived>& x)
{
  using Real = RealOf<Derived>;
  using Matrix = ComplexMatrix<Real>;
  require_square(x, "svd");
  Eigen::BDCSVD<Matrix> solver(Matrix(x), Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success)
    throw FactorizationFailure("svd", -1);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

template <typename Derived>
RealVector<RealOf<Derived>> singular_values(const Eigen::MatrixBase<Derived>& x)
{
  using Matrix = ComplexMatrix<RealOf<Derived>>;
  require_square(x, "singular_values");
  Eigen::BDCSVD<Matrix> solver{Matrix(x)};
  if (solver.info() != Eigen::Success)
    throw FactorizationFailure("svd", -1);
  return solver.singularValues();
}

/// Count of singular values above tol * s_1; zero when s_1 is below the absolute floor.
template <typename Real>
Index rank_from_singular_values(const RealVector<Real>& s, Real tol)
{
  if (s.size() == 0 || !(s(0) > Real(kRankAbsoluteFloor)))
    return 0;
  const Real cut = tol * s(0);
  Index k = 0;
  while (k < s.size() && s(k) > cut)
    ++k;
  return k;
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& x, RealOf<Derived> tol)
{
  return rank_from_singular_values(singular_values(x), tol);
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& x)
{
  return numerical_rank(x, default_rank_tol<RealOf<Derived>>(x.rows()));
}

// ---------------------------------------------------------------------------
// Polar decomposition

template <typename Real>
struct PolarResult {
  ComplexMatrix<Real> v;     // partial isometry (or unitary when requested)
  ComplexMatrix<Real> absx;  // |x| = v* x
  Index rank = 0;
};

/// x = v |x|. By default v is the partial isometry with v v* = l(x) and
/// v* v = r(x); with `unitary` it is extended across the kernels.
template <typename Derived>
PolarResult<RealOf<Derived>> polar(const Eigen::MatrixBase<Derived>& x, bool unitary,
                                   RealOf<Derived> tol)
{
  using Real = RealOf<Derived>;
  using Scalar = std::complex<Real>;
  const auto f = svd(x);
  const Index k = rank_from_singular_values(f.s, tol);
  PolarResult<Real> out;
  out.rank = k;
  if (unitary) {
    out.v = f.u * f.v.adjoint();
    out.absx = f.v * f.s.template cast<Scalar>().asDiagonal() * f.v.adjoint();
  } else {
    out.v = f.u.leftCols(k) * f.v.leftCols(k).adjoint();
    out.absx = f.v.leftCols(k) * f.s.head(k).template cast<Scalar>().asDiagonal() *
               f.v.leftCols(k).adjoint();
  }
  out.absx = (out.absx + out.absx.adjoint()) * Scalar(Real(0.5));
  return out;
}

template <typename Derived>
PolarResult<RealOf<Derived>> polar(const Eigen::MatrixBase<Derived>& x, bool unitary = false)
{
  return polar(x, unitary, default_rank_tol<RealOf<Derived>>(x.rows()));
}

// ---------------------------------------------------------------------------
// Partial inverse

/// Moore-Penrose inverse with singular values <= tol * s_1 treated as zero.
template <typename Derived>
ComplexMatrix<RealOf<Derived>> pinv(const Eigen::MatrixBase<Derived>& x, RealOf<Derived> tol)
{
  using Real = RealOf<Derived>;
  using Scalar = std::complex<Real>;
  const auto f = svd(x);
  const Index k = rank_from_singular_values(f.s, tol);
  RealVector<Real> inv = f.s.head(k).cwiseInverse();
  return f.v.leftCols(k) * inv.template cast<Scalar>().asDiagonal() * f.u.leftCols(k).adjoint();
}

template <typename Derived>
ComplexMatrix<RealOf<Derived>> pinv(const Eigen::MatrixBase<Derived>& x)
{
  return pinv(x, default_rank_tol<RealOf<Derived>>(x.rows()));
}

// ---------------------------------------------------------------------------
// Complex Schur form

template <typename Real>
struct SchurResult {
  ComplexMatrix<Real> q;  // unitary
  ComplexMatrix<Real> t;  // upper triangular, exact zeros below the diagonal
  ComplexVector<Real> eigenvalues;

  ComplexMatrix<Real> reconstruct() const { return q * t * q.adjoint(); }
};

/// x = q t q* via Hessenberg reduction and shifted QR, capped at 100 n iterations.
template <typename Derived>
SchurResult<RealOf<Derived>> schur(const Eigen::MatrixBase<Derived>& x)
{
  using Real = RealOf<Derived>;
  using Matrix = ComplexMatrix<Real>;
  require_square(x, "schur");
  const Index n = x.rows();
  Eigen::ComplexSchur<Matrix> solver(n);
  solver.setMaxIterations(100 * n);
  solver.compute(Matrix(x), true);
  if (solver.info() != Eigen::Success)
    throw FactorizationFailure("schur", static_cast<long>(100 * n));
  SchurResult<Real> out;
  out.q = solver.matrixU();
  out.t = solver.matrixT().template triangularView<Eigen::Upper>();
  out.eigenvalues = out.t.diagonal();
  return out;
}

template <typename Real>
ComplexVector<Real> eigenvalues(const ComplexMatrix<Real>& x)
{
  return schur(x).eigenvalues;
}

namespace detail {

/// Exchange the diagonal entries (i, i) and (i+1, i+1) of an upper triangular
/// t by a plane rotation, updating q so that q t q* is unchanged.
template <typename Real>
void swap_adjacent(ComplexMatrix<Real>& q, ComplexMatrix<Real>& t, Index i, Real swap_tol)
{
  using Scalar = std::complex<Real>;
  const Index n = t.rows();
  const Scalar a = t(i, i);
  const Scalar c = t(i + 1, i + 1);
  const Scalar b = t(i, i + 1);
  const Real scale = std::max(Real(1), std::max(std::abs(a), std::abs(c)));
  const Real gap = std::abs(c - a);

  Scalar g1, g2;
  if (gap <= swap_tol * scale) {
    if (std::abs(b) > swap_tol * scale)
      throw IllConditionedSwap(Complex(std::real(a), std::imag(a)), Complex(std::real(c), std::imag(c)));
    // Coincident eigenvalues with negligible coupling: plain permutation.
    g1 = Scalar(0);
    g2 = Scalar(1);
  } else {
    // Eigenvector of the 2x2 block for c is (b, c - a), i.e. the 1x1 Sylvester solution.
    g1 = b;
    g2 = c - a;
    const Real h = std::hypot(std::abs(g1), std::abs(g2));
    g1 /= h;
    g2 /= h;
  }
  // G = [g1 -conj(g2); g2 conj(g1)], first column the eigenvector for c.
  Eigen::Matrix<Scalar, 2, 2> g;
  g << g1, -std::conj(g2), g2, std::conj(g1);

  t.block(i, i, 2, n - i) = g.adjoint() * t.block(i, i, 2, n - i);
  t.block(0, i, i + 2, 2) = t.block(0, i, i + 2, 2) * g;
  q.middleCols(i, 2) = q.middleCols(i, 2) * g;
  t(i, i) = c;
  t(i + 1, i + 1) = a;
  t(i + 1, i) = Scalar(0);
}

}  // namespace detail

/// Reorder a Schur form so that every eigenvalue with select(lambda) true comes
/// first, keeping the relative order inside each group. Uses adjacent swaps only.
template <typename Real, typename Predicate>
SchurResult<Real> schur_reorder(const SchurResult<Real>& sr, Predicate&& select,
                                Real swap_tol = Real(1e-12))
{
  SchurResult<Real> out = sr;
  const Index n = out.t.rows();
  std::vector<char> chosen(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    chosen[static_cast<std::size_t>(i)] = select(out.t(i, i)) ? 1 : 0;

  Index front = 0;
  for (Index j = 0; j < n; ++j) {
    if (!chosen[static_cast<std::size_t>(j)])
      continue;
    for (Index k = j; k > front; --k) {
      detail::swap_adjacent(out.q, out.t, k - 1, swap_tol);
      std::swap(chosen[static_cast<std::size_t>(k - 1)], chosen[static_cast<std::size_t>(k)]);
    }
    ++front;
  }
  out.t.template triangularView<Eigen::StrictlyLower>().setZero();
  out.eigenvalues = out.t.diagonal();
  return out;
}

/// Number of leading eigenvalues of a reordered Schur form satisfying select.
template <typename Real, typename Predicate>
Index count_selected(const SchurResult<Real>& sr, Predicate&& select)
{
  Index k = 0;
  for (Index i = 0; i < sr.eigenvalues.size(); ++i)
    if (select(sr.eigenvalues(i)))
      ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Small non-template helpers (matcore.cpp)

/// ||u* u - I||_F
double unitarity_defect(const CMatrix& u);

/// s_1 / s_n, infinite for singular input.
double condition_number(const CMatrix& x);

/// (x + x*) / 2
CMatrix hermitian_part(const CMatrix& x);

/// Smallest |lambda_i - z| over the spectrum.
double distance_to_spectrum(const CVector& spectrum, Complex z);

}  // namespace fkrank
