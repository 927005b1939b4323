#include "fkrank/maps.hpp"

#include <algorithm>
#include <cmath>

#include "fkrank/fkdet.hpp"

namespace fkrank {

CVector vec(const CMatrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

CMatrix unvec(const CVector& v, Index n)
{
  if (v.size() != n * n)
    throw UsageError("unvec: length is not n^2");
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

namespace {

/// kron(b^T, a): vec(a x b) = kron(b^T, a) vec(x).
CMatrix sandwich_operator(const CMatrix& a, const CMatrix& b)
{
  const Index n = a.rows();
  CMatrix op(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      op.block(i * n, j * n, n, n) = b(j, i) * a;
  return op;
}

/// vec(x^T) = K vec(x)
CMatrix commutation_operator(Index n)
{
  CMatrix k = CMatrix::Zero(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      k(i + j * n, j + i * n) = 1.0;
  return k;
}

CMatrix random_probe(Index n, Index counter, Stream& base)
{
  Stream rng = base.child(static_cast<std::uint64_t>(counter));
  if (counter % 2 == 0 && n > 1)
    return conditioned_low_rank(n, rng.uniform_index(1, n - 1), rng);
  return conditioned_low_rank(n, n, rng);
}

}  // namespace

// ---------------------------------------------------------------------------
// MatrixMap

MatrixMap::MatrixMap(Index n, MapKind kind, CMatrix op) : n_(n), kind_(kind), op_(std::move(op))
{
  if (n < 1 || op_.rows() != n * n || op_.cols() != n * n)
    throw UsageError("MatrixMap: operator must be n^2 x n^2");
  if (!op_.allFinite())
    throw UsageError("MatrixMap: operator has non-finite entries");
}

MatrixMap MatrixMap::identity(Index n) { return MatrixMap(n, MapKind::linear, CMatrix::Identity(n * n, n * n)); }

MatrixMap MatrixMap::transpose(Index n) { return MatrixMap(n, MapKind::linear, commutation_operator(n)); }

MatrixMap MatrixMap::conjugation(Index n)
{
  return MatrixMap(n, MapKind::conjugate_linear, CMatrix::Identity(n * n, n * n));
}

MatrixMap MatrixMap::left_multiplication(const CMatrix& a)
{
  require_square(a, "left_multiplication");
  return MatrixMap(a.rows(), MapKind::linear, sandwich_operator(a, CMatrix::Identity(a.rows(), a.rows())));
}

MatrixMap MatrixMap::right_multiplication(const CMatrix& b)
{
  require_square(b, "right_multiplication");
  return MatrixMap(b.rows(), MapKind::linear, sandwich_operator(CMatrix::Identity(b.rows(), b.rows()), b));
}

CMatrix MatrixMap::apply(const CMatrix& x) const
{
  if (x.rows() != n_ || x.cols() != n_)
    throw UsageError("MatrixMap::apply: dimension mismatch");
  const CVector v = is_linear() ? vec(x) : vec(x.conjugate());
  return unvec(op_ * v, n_);
}

bool MatrixMap::is_bijective() const { return numerical_rank(op_) == n_ * n_; }

MatrixMap compose(const MatrixMap& f, const MatrixMap& g)
{
  if (f.order() != g.order())
    throw UsageError("compose: dimension mismatch");
  // f(g(x)): a conjugate-linear outer map conjugates the inner operator.
  const CMatrix op = f.is_linear() ? CMatrix(f.op() * g.op()) : CMatrix(f.op() * g.op().conjugate());
  return MatrixMap(f.order(), f.kind() ^ g.kind(), op);
}

MatrixMap invert(const MatrixMap& f)
{
  if (!f.is_bijective())
    throw NonBijective("invert: map is not bijective");
  Eigen::PartialPivLU<CMatrix> lu(f.op());
  CMatrix inv = lu.inverse();
  if (!f.is_linear())
    inv = inv.conjugate();
  return MatrixMap(f.order(), f.kind(), std::move(inv));
}

// ---------------------------------------------------------------------------
// Canonical forms

CMatrix MapForm::apply(const CMatrix& x) const
{
  CMatrix y = conjugated ? CMatrix(x.conjugate()) : x;
  if (jordan == JordanKind::transpose)
    y.transposeInPlace();
  return a * y * b;
}

MatrixMap from_form(const MapForm& form)
{
  require_square(form.a, "from_form");
  require_square(form.b, "from_form");
  require_same_order(form.a, form.b, "from_form");
  const Index n = form.a.rows();
  if (numerical_rank(form.a) < n || numerical_rank(form.b) < n)
    throw UsageError("from_form: a and b must be invertible");
  CMatrix op = sandwich_operator(form.a, form.b);
  if (form.jordan == JordanKind::transpose)
    op = op * commutation_operator(n);
  return MatrixMap(n, form.conjugated ? MapKind::conjugate_linear : MapKind::linear, std::move(op));
}

// ---------------------------------------------------------------------------
// Checkers

Verdict is_rank_isometry(const MatrixMap& f, const ProbeSet& probes)
{
  if (!f.is_bijective())
    throw NonBijective("is_rank_isometry: map is not bijective");
  const Index n = f.order();
  Verdict verdict;
  verdict.seed = probes.seed;

  const auto check = [&](const CMatrix& z) {
    ++verdict.probes_checked;
    const Index before = numerical_rank(z, probes.rank_tol);
    const Index after = numerical_rank(f.apply(z), probes.rank_tol);
    if (before == after)
      return true;
    verdict.pass = false;
    verdict.witness = z;
    verdict.worst = std::abs(static_cast<double>(after - before)) / static_cast<double>(n);
    verdict.detail = "rank " + std::to_string(before) + " maps to rank " + std::to_string(after);
    return false;
  };

  if (probes.structured && !for_each_structured_probe(n, check))
    return verdict;
  Stream base(probes.seed);
  for (Index r = 0; r < probes.random_count; ++r)
    if (!check(random_probe(n, r, base)))
      return verdict;
  return verdict;
}

Verdict is_det_preserving(const MatrixMap& f, const ProbeSet& probes, bool allow_conjugate)
{
  if (!f.is_linear() && !allow_conjugate)
    throw UsageError("is_det_preserving: conjugate-linear map needs allow_conjugate");
  const Index n = f.order();
  Verdict verdict;
  verdict.seed = probes.seed;

  const auto check = [&](const CMatrix& z) {
    ++verdict.probes_checked;
    const double before = fk_det(z, probes.rank_tol);
    const double after = fk_det(f.apply(z), probes.rank_tol);
    const double err = std::abs(after - before) / std::max(1.0, before);
    verdict.worst = std::max(verdict.worst, err);
    if (err <= kDetTol)
      return true;
    verdict.pass = false;
    verdict.witness = z;
    verdict.detail = "det " + std::to_string(before) + " maps to " + std::to_string(after);
    return false;
  };

  Stream base(probes.seed);
  for (Index r = 0; r < probes.random_count; ++r) {
    // Alternate Gaussian and conditioned invertible probes; the random
    // singular probes come from random_probe's low-rank branch.
    Stream rng = base.child(static_cast<std::uint64_t>(r));
    CMatrix z = r % 3 == 0 ? ginibre(n, rng) : random_probe(n, r, base);
    if (!check(z))
      return verdict;
  }
  if (probes.structured && n <= 8)
    for_each_structured_probe(n, check);
  else if (probes.structured)
    for (Index a = 0; a < n * n && verdict.pass; ++a)
      check(matrix_unit(n, a % n, a / n));
  return verdict;
}

MultiplicativityReport is_multiplicative(const MatrixMap& f, const ProbeSet& probes)
{
  const Index n = f.order();
  if (n < 2)
    throw UsageError("is_multiplicative: n must be at least 2");
  MultiplicativityReport report;
  report.seed = probes.seed;
  Stream base(probes.seed);
  const Index pairs = std::max<Index>(probes.random_count, 4);
  double worst_min = -1.0;
  for (Index r = 0; r < pairs; ++r) {
    Stream rng = base.child(static_cast<std::uint64_t>(r));
    const CMatrix x = ginibre(n, rng);
    const CMatrix y = ginibre(n, rng);
    const CMatrix fx = f.apply(x);
    const CMatrix fy = f.apply(y);
    const CMatrix fxy = f.apply(x * y);
    const double scale = std::max(fx.norm() * fy.norm(), 1e-300);
    const double iso = (fxy - fx * fy).norm() / scale;
    const double anti = (fxy - fy * fx).norm() / scale;
    report.iso_residual = std::max(report.iso_residual, iso);
    report.anti_residual = std::max(report.anti_residual, anti);
    if (std::min(iso, anti) > worst_min) {
      worst_min = std::min(iso, anti);
      report.witness_x = x;
      report.witness_y = y;
    }
  }
  const bool iso = report.iso_residual <= kMultiplicativeTol;
  const bool anti = report.anti_residual <= kMultiplicativeTol;
  if (iso && !anti)
    report.classification = Multiplicativity::iso;
  else if (anti && !iso)
    report.classification = Multiplicativity::anti;
  else
    report.classification = Multiplicativity::neither;
  return report;
}

Supports support_image(const MatrixMap& f, const Projection& p, double rank_tol)
{
  if (p.order() != f.order())
    throw UsageError("support_image: dimension mismatch");
  return supports(f.apply(p.matrix()), rank_tol);
}

const char* to_string(MapKind kind) { return kind == MapKind::linear ? "linear" : "conjugate"; }

const char* to_string(JordanKind kind) { return kind == JordanKind::identity ? "identity" : "transpose"; }

const char* to_string(Multiplicativity m)
{
  switch (m) {
    case Multiplicativity::iso:
      return "iso";
    case Multiplicativity::anti:
      return "anti";
    default:
      return "neither";
  }
}

}  // namespace fkrank
