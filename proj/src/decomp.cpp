#include "fkrank/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fkrank/fkdet.hpp"

namespace fkrank {

namespace {

constexpr double kBrownChainTol = 1e-6;

std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

DecompositionResult rejected(DecompositionResult r, std::string detail, std::optional<CMatrix> witness,
                             std::optional<CMatrix> pair = std::nullopt)
{
  r.classification = Classification::not_an_isometry;
  r.form.reset();
  r.detail = std::move(detail);
  r.witness = std::move(witness);
  r.witness_pair = std::move(pair);
  return r;
}

/// Determinant-to-rank chain on one probe x with unitary polar part u:
/// y = f(x) f(u)^{-1} must share the Brown measure of |x|, and then
/// rank f(x) = rank x.
std::optional<std::string> det_rank_chain(const MatrixMap& f, const CMatrix& x, double rank_tol)
{
  const Index n = f.order();
  const auto pol = polar(x, true, rank_tol);
  const CMatrix fu = f.apply(pol.v);
  if (numerical_rank(fu, rank_tol) < n)
    return std::string("image of a unitary is singular");
  const CMatrix fx = f.apply(x);
  const CMatrix y = fu.transpose().partialPivLu().solve(fx.transpose()).transpose();  // fx fu^{-1}
  const double scale = std::max(1.0, pol.absx.norm());
  const double dist = matching_distance(brown_measure(y), brown_measure(pol.absx));
  if (!(dist <= kBrownChainTol * scale))
    return "Brown measure of f(x) f(u)^-1 differs from that of |x| by " + std::to_string(dist);
  const Index before = numerical_rank(x, rank_tol);
  const Index after = numerical_rank(fx, rank_tol);
  if (before != after)
    return "rank " + std::to_string(before) + " maps to rank " + std::to_string(after);
  return std::nullopt;
}


/// Nearest Kronecker product: the sandwich operator b^T (x) a of x -> a x b,
/// rearranged block by block, is the rank-one matrix vec(b^T) vec(a)^T.
MapForm kronecker_fit(const MatrixMap& f, JordanKind jordan, bool conjugated)
{
  const Index n = f.order();
  CMatrix op = f.op();
  if (jordan == JordanKind::transpose)
    op = op * MatrixMap::transpose(n).op();
  CMatrix r(n * n, n * n);
  for (Index l = 0; l < n; ++l)
    for (Index k = 0; k < n; ++k)
      r.row(k + l * n) = op.block(k * n, l * n, n, n).reshaped().transpose();
  Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CVector u = svd.matrixU().col(0) * svd.singularValues()(0);
  const CVector v = svd.matrixV().col(0).conjugate();
  MapForm form;
  form.a = v.reshaped(n, n);
  form.b.resize(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index k = 0; k < n; ++k)
      form.b(l, k) = u(k + l * n);
  form.jordan = jordan;
  form.conjugated = conjugated;
  return form;
}

}  // namespace

UnitalNormalization normalize_unital(const MatrixMap& f, double rank_tol)
{
  const Index n = f.order();
  const CMatrix eye = CMatrix::Identity(n, n);
  CMatrix c = f.apply(eye);
  if (numerical_rank(c, rank_tol) < n)
    throw NotAnIsometry("f(1) is singular", eye);
  const CMatrix c_inv = c.partialPivLu().inverse();
  return {compose(MatrixMap::right_multiplication(c_inv), f), std::move(c)};
}

void fix_gauge(CMatrix& a, CMatrix& b)
{
  const double norm = a.norm();
  if (!(norm > 0.0))
    throw Degeneracy("fix_gauge: a is zero");
  a /= norm;
  b *= norm;
  const double cut = 1e-12 * a.cwiseAbs().maxCoeff();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > cut) {
        const Complex phase = a(i, j) / std::abs(a(i, j));
        a *= std::conj(phase);
        b *= phase;
        return;
      }
}

CMatrix skolem_noether(const MatrixMap& f)
{
  if (!f.is_linear())
    throw UsageError("skolem_noether: map must be linear");
  const Index n = f.order();
  const CMatrix f11 = f.apply(matrix_unit(n, 0, 0));
  Index best = 0;
  double best_norm = -1.0;
  for (Index j = 0; j < n; ++j) {
    const double norm = f11.col(j).norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = j;
    }
  }
  if (!(best_norm > 1e-300))
    throw Degeneracy("skolem_noether: image of e_11 is numerically zero");
  const CVector v = f11.col(best) / best_norm;

  CMatrix s(n, n);
  for (Index j = 0; j < n; ++j)
    s.col(j) = f.apply(matrix_unit(n, j, 0)) * v;
  if (numerical_rank(s, 1e-12) < n)
    throw Inconsistency("skolem_noether: transported basis is singular");

  CMatrix dummy = CMatrix::Identity(1, 1);
  fix_gauge(s, dummy);

  const CMatrix s_inv = s.partialPivLu().inverse();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const CMatrix target = f.apply(matrix_unit(n, i, j));
      const CMatrix implemented = s.col(i) * s_inv.row(j);  // s e_ij s^{-1}
      const double err = (implemented - target).norm() / std::max(1.0, target.norm());
      if (err > kConjugationTol)
        throw Inconsistency("skolem_noether: conjugation residual " + sci(err));
    }
  return s;
}

double basis_residual(const MatrixMap& f, const MapForm& form)
{
  const Index n = f.order();
  double worst = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const CMatrix e = matrix_unit(n, i, j);
      const CMatrix target = f.apply(e);
      const double err = (form.apply(e) - target).norm() / std::max(1.0, target.norm());
      worst = std::max(worst, err);
    }
  return worst;
}

DecompositionResult decompose(const MatrixMap& f, DecomposeMode mode, const ProbeSet& probes)
{
  DecompositionResult result;
  result.seed = probes.seed;
  const Index n = f.order();
  if (!f.is_bijective()) {
    result.classification = Classification::not_bijective;
    result.detail = "operator is rank deficient";
    return result;
  }

  if (mode == DecomposeMode::det_preserving) {
    const Verdict det = is_det_preserving(f, probes, true);
    if (!det.pass)
      return rejected(result, "determinant not preserved: " + det.detail, det.witness);
    Stream base(probes.seed ^ 0x5bd1e995ULL);
    std::vector<CMatrix> chain;
    for (Index a = 0; a < n * n; ++a)
      chain.push_back(matrix_unit(n, a % n, a / n));
    for (Index r = 0; r < probes.random_count; ++r) {
      Stream rng = base.child(static_cast<std::uint64_t>(r));
      const Index k = n > 1 ? rng.uniform_index(1, n) : 1;
      chain.push_back(conditioned_low_rank(n, k, rng));
    }
    for (const CMatrix& x : chain)
      if (auto failure = det_rank_chain(f, x, probes.rank_tol))
        return rejected(result, "rank not preserved: " + *failure, x);
  } else {
    const Verdict rank = is_rank_isometry(f, probes);
    if (!rank.pass)
      return rejected(result, "rank not preserved: " + rank.detail, rank.witness);
  }

  std::optional<UnitalNormalization> unital;
  try {
    unital = normalize_unital(f, probes.rank_tol);
  } catch (const NotAnIsometry& e) {
    return rejected(result, e.what(), e.witness());
  }

  MatrixMap g = unital->unital;
  const bool conjugated = !g.is_linear();
  if (conjugated)
    g = compose(g, MatrixMap::conjugation(n));

  JordanKind jordan = JordanKind::identity;
  const MultiplicativityReport first = is_multiplicative(g, probes);
  if (first.classification == Multiplicativity::neither)
    return rejected(result, "neither multiplicative nor anti-multiplicative", first.witness_x, first.witness_y);
  if (first.classification == Multiplicativity::anti) {
    jordan = JordanKind::transpose;
    g = compose(g, MatrixMap::transpose(n));
    const MultiplicativityReport second = is_multiplicative(g, probes);
    if (second.classification != Multiplicativity::iso)
      return rejected(result, "transposed map is not multiplicative", second.witness_x, second.witness_y);
  }

  CMatrix s;
  try {
    s = skolem_noether(g);
  } catch (const Degeneracy& e) {
    return rejected(result, e.what(), std::nullopt);
  } catch (const Inconsistency& e) {
    return rejected(result, e.what(), std::nullopt);
  }

  MapForm form;
  form.a = s;
  form.b = s.partialPivLu().solve(unital->c);
  form.jordan = jordan;
  form.conjugated = conjugated;
  fix_gauge(form.a, form.b);
  result.residual = basis_residual(f, form);

  // The transported pair carries the rounding of f(1)^{-1}; a direct fit of
  // the operator is backward stable.
  MapForm fitted = kronecker_fit(f, jordan, conjugated);
  if (fitted.a.allFinite() && fitted.b.allFinite() && fitted.a.norm() > 0.0) {
    fix_gauge(fitted.a, fitted.b);
    const double fitted_residual = basis_residual(f, fitted);
    if (fitted_residual < result.residual) {
      form = std::move(fitted);
      result.residual = fitted_residual;
    }
  }

  if (!(result.residual <= kReconstructionTol))
    return rejected(result, "reconstruction residual " + sci(result.residual), std::nullopt);
  result.classification =
      jordan == JordanKind::transpose ? Classification::anti_isomorphism : Classification::isomorphism;
  result.form = std::move(form);
  return result;
}

std::optional<CMatrix> reject_probe(const MatrixMap& f, const ProbeSet& probes)
{
  if (!f.is_bijective())
    throw NonBijective("reject_probe: map is not bijective");
  const Index n = f.order();
  // Canonical forms scale every determinant by the same factor det f(1).
  const double scale = fk_det(f.apply(CMatrix::Identity(n, n)), probes.rank_tol);
  std::optional<CMatrix> witness;
  for_each_structured_probe(n, [&](const CMatrix& z) {
    const CMatrix fz = f.apply(z);
    const bool rank_ok = numerical_rank(z, probes.rank_tol) == numerical_rank(fz, probes.rank_tol);
    const double expected = scale * fk_det(z, probes.rank_tol);
    const double got = fk_det(fz, probes.rank_tol);
    const bool det_ok = std::abs(got - expected) <= kDetTol * std::max(1.0, expected);
    if (rank_ok && det_ok)
      return true;
    witness = z;
    return false;
  });
  return witness;
}

const char* to_string(Classification c)
{
  switch (c) {
    case Classification::isomorphism:
      return "isomorphism";
    case Classification::anti_isomorphism:
      return "anti-isomorphism";
    case Classification::not_an_isometry:
      return "not-an-isometry";
    default:
      return "not-bijective";
  }
}

}  // namespace fkrank
