#include "fkrank/regring.hpp"

#include <cmath>

namespace fkrank {

namespace {

// Relative cut for lattice operations on stacked projections. Exact overlaps
// leave residual singular values near machine epsilon, genuine ones sit far above.
constexpr double kLatticeRankTol = 1e-10;

CMatrix columns_above(const CMatrix& u, const RVector& s, double cut)
{
  Index k = 0;
  while (k < s.size() && s(k) > cut)
    ++k;
  return u.leftCols(k);
}

/// Gram-Schmidt over the columns of a projection in index order; returns an
/// orthonormal basis of its range with `dim` columns.
CMatrix ordered_range_basis(const CMatrix& proj, Index dim)
{
  const Index n = proj.rows();
  CMatrix basis(n, dim);
  const double threshold = 0.5 / std::sqrt(static_cast<double>(n));
  Index found = 0;
  for (Index j = 0; j < n && found < dim; ++j) {
    CVector v = proj.col(j);
    for (int pass = 0; pass < 2; ++pass)
      v -= basis.leftCols(found) * (basis.leftCols(found).adjoint() * v);
    const double norm = v.norm();
    if (norm < threshold)
      continue;
    basis.col(found++) = v / norm;
  }
  if (found < dim)
    throw Inconsistency("ordered_range_basis: projection rank below expected dimension");
  return basis;
}

}  // namespace

// ---------------------------------------------------------------------------
// Projection

Projection Projection::from_matrix(const CMatrix& m, double tol)
{
  require_square(m, "Projection");
  const double idem = (m * m - m).norm();
  const double herm = (m - m.adjoint()).norm();
  if (idem > tol || herm > tol)
    throw UsageError("Projection: not an orthogonal projection (idempotency residual " +
                     std::to_string(idem) + ", hermiticity residual " + std::to_string(herm) + ")");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m));
  const RVector& w = eig.eigenvalues();
  std::vector<Index> keep;
  for (Index i = w.size() - 1; i >= 0; --i)
    if (w(i) > 0.5)
      keep.push_back(i);
  CMatrix basis(m.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Index>(c)) = eig.eigenvectors().col(keep[c]);
  return onto_orthonormal(basis, m.rows());
}

Projection Projection::onto_orthonormal(const CMatrix& basis, Index n)
{
  if (basis.rows() != n)
    throw UsageError("Projection: basis has wrong row count");
  CMatrix m = basis * basis.adjoint();
  m = hermitian_part(m);
  return Projection(std::move(m), basis.cols());
}

Projection Projection::zero(Index n) { return Projection(CMatrix::Zero(n, n), 0); }

Projection Projection::identity(Index n) { return Projection(CMatrix::Identity(n, n), n); }

Projection Projection::complement() const
{
  CMatrix m = CMatrix::Identity(order(), order()) - m_;
  return Projection(std::move(m), order() - rank_);
}

CMatrix Projection::range_basis() const
{
  if (rank_ == 0)
    return CMatrix(order(), 0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m_);
  // Eigenvalues ascend; the range is spanned by the top `rank_` vectors.
  return eig.eigenvectors().rightCols(rank_).rowwise().reverse();
}

double projection_distance(const Projection& p, const Projection& q)
{
  return (p.matrix() - q.matrix()).norm();
}

bool projection_leq(const Projection& p, const Projection& q, double tol)
{
  return (q.matrix() * p.matrix() - p.matrix()).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Supports, partial inverse, rank metric

Supports supports(const CMatrix& x, double tol)
{
  const auto f = svd(x);
  const Index k = rank_from_singular_values(f.s, tol);
  return {Projection::onto_orthonormal(f.u.leftCols(k), x.rows()),
          Projection::onto_orthonormal(f.v.leftCols(k), x.rows())};
}

Supports supports(const CMatrix& x) { return supports(x, default_rank_tol(x.rows())); }

CMatrix partial_inverse(const CMatrix& x, double tol) { return pinv(x, tol); }

CMatrix partial_inverse(const CMatrix& x) { return pinv(x); }

double rank_metric(const CMatrix& x, const CMatrix& y, double tol)
{
  require_same_order(x, y, "rank_metric");
  return rank_norm(x - y, tol);
}

double rank_metric(const CMatrix& x, const CMatrix& y)
{
  return rank_metric(x, y, default_rank_tol(x.rows()));
}

double rank_norm(const CMatrix& x, double tol)
{
  return static_cast<double>(numerical_rank(x, tol)) / static_cast<double>(x.rows());
}

double rank_norm(const CMatrix& x) { return rank_norm(x, default_rank_tol(x.rows())); }

double sv_function(const CMatrix& x, double t)
{
  if (!(t >= 0.0 && t < 1.0))
    throw UsageError("sv_function: t must lie in [0, 1)");
  const RVector s = singular_values(x);
  const auto idx = static_cast<Index>(std::floor(t * static_cast<double>(x.rows())));
  return s(std::min(idx, x.rows() - 1));
}

double l0_norm(const CMatrix& x)
{
  const RVector s = singular_values(x);
  const Index n = x.rows();
  // On [k/n, (k+1)/n) the step function equals s_k; t >= 1 contributes t itself.
  double best = 1.0;
  for (Index k = 0; k < n; ++k)
    best = std::min(best, static_cast<double>(k) / static_cast<double>(n) + s(k));
  return best;
}

// ---------------------------------------------------------------------------
// Peirce decomposition

PeirceBlocks peirce_decompose(const CMatrix& x, const Projection& p)
{
  require_square(x, "peirce_decompose");
  if (p.order() != x.rows())
    throw UsageError("peirce_decompose: dimension mismatch");
  const CMatrix& pm = p.matrix();
  const CMatrix qm = CMatrix::Identity(x.rows(), x.cols()) - pm;
  return {p, pm * x * pm, pm * x * qm, qm * x * pm, qm * x * qm};
}

// ---------------------------------------------------------------------------
// Idempotents

double idempotency_residual(const CMatrix& e) { return (e * e - e).norm(); }

Index idempotent_rank(const CMatrix& e)
{
  const RVector s = singular_values(e);
  Index k = 0;
  while (k < s.size() && s(k) > 0.5)
    ++k;
  return k;
}

IdempotentSplit idempotent_split(const CMatrix& e)
{
  require_square(e, "idempotent_split");
  const double residual = idempotency_residual(e);
  if (residual > kIdempotencyTol)
    throw IdempotencyViolation(residual);
  const auto f = svd(e);
  Index k = 0;
  while (k < f.s.size() && f.s(k) > 0.5)
    ++k;
  Projection p = Projection::onto_orthonormal(f.u.leftCols(k), e.rows());
  CMatrix u = e - p.matrix();
  return {std::move(p), std::move(u)};
}

Conjugator projection_conjugator(const CMatrix& e)
{
  const IdempotentSplit split = idempotent_split(e);
  const Index n = e.rows();
  const CMatrix& p = split.p.matrix();
  const CMatrix q = CMatrix::Identity(n, n) - p;
  return {p + split.u + q, p - split.u + q};
}

// ---------------------------------------------------------------------------
// Normalizers

SupportNormalizers support_normalizers(const CMatrix& x, double tol)
{
  require_square(x, "support_normalizers");
  const Index n = x.rows();
  const auto f = svd(x);
  const Index k = rank_from_singular_values(f.s, tol);
  if (k == 0)
    throw UsageError("support_normalizers: x is zero, no invertible normalizer exists");

  const RVector inv = f.s.head(k).cwiseInverse();
  const CMatrix ix = f.v.leftCols(k) * inv.cast<Complex>().asDiagonal() * f.u.leftCols(k).adjoint();
  const CMatrix left = f.u.leftCols(k) * f.u.leftCols(k).adjoint();
  const CMatrix right = f.v.leftCols(k) * f.v.leftCols(k).adjoint();
  const CMatrix eye = CMatrix::Identity(n, n);

  CMatrix w = CMatrix::Zero(n, n);
  if (k < n) {
    const CMatrix kernel_left = ordered_range_basis(eye - left, n - k);    // ker x*
    const CMatrix kernel_right = ordered_range_basis(eye - right, n - k);  // ker x
    w = kernel_right * kernel_left.adjoint();
  }
  CMatrix a = w + ix;
  return {a, a};
}

SupportNormalizers support_normalizers(const CMatrix& x)
{
  return support_normalizers(x, default_rank_tol(x.rows()));
}

// ---------------------------------------------------------------------------
// Lattice

namespace {

struct StackedRange {
  CMatrix basis;
  double gap;
};

StackedRange join_range(const CMatrix& p, const CMatrix& q)
{
  const Index n = p.rows();
  CMatrix stacked(n, 2 * n);
  stacked << p, q;
  Eigen::BDCSVD<CMatrix> solver(stacked, Eigen::ComputeFullU);
  if (solver.info() != Eigen::Success)
    throw FactorizationFailure("svd", -1);
  // Projections have unit scale, so the cut is absolute: the complement of a
  // numerically full projection must come out empty.
  const RVector& s = solver.singularValues();
  if (s.size() == 0 || s(0) <= kLatticeRankTol)
    return {CMatrix(n, 0), s.size() == 0 ? 1.0 : 1.0 - s(0)};
  const CMatrix basis = columns_above(solver.matrixU(), s, kLatticeRankTol);
  const Index k = basis.cols();
  const double kept = s(k - 1);
  const double dropped = k < s.size() ? s(k) : 0.0;
  return {basis, kept - dropped};
}

}  // namespace

MeetJoin proj_meet_join(const Projection& p, const Projection& q)
{
  if (p.order() != q.order())
    throw UsageError("proj_meet_join: dimension mismatch");
  const Index n = p.order();
  const StackedRange join = join_range(p.matrix(), q.matrix());
  const CMatrix eye = CMatrix::Identity(n, n);
  const StackedRange co_join = join_range(eye - p.matrix(), eye - q.matrix());
  MeetJoin out{Projection::onto_orthonormal(co_join.basis, n).complement(),
               Projection::onto_orthonormal(join.basis, n), std::min(join.gap, co_join.gap), false};
  out.ambiguous = out.rank_gap < kAmbiguousGap;
  return out;
}

}  // namespace fkrank
