#include "fkrank/random.hpp"

#include <cmath>

namespace fkrank {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Index Stream::uniform_index(Index lo, Index hi)
{
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(engine_);
}

CMatrix ginibre(Index rows, Index cols, Stream& rng)
{
  CMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      g(i, j) = rng.complex_normal();
  return g;
}

CMatrix ginibre(Index n, Stream& rng) { return ginibre(n, n, rng); }

CMatrix haar_unitary(Index n, Stream& rng)
{
  const CMatrix g = ginibre(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0)
      q.col(j) *= r(j, j) / mag;
  }
  return q;
}

CMatrix random_projection(Index n, Index k, Stream& rng)
{
  if (k < 0 || k > n)
    throw UsageError("random_projection: rank out of range");
  const CMatrix u = haar_unitary(n, rng);
  return u.leftCols(k) * u.leftCols(k).adjoint();
}

CMatrix random_invertible(Index n, double cond_max, Stream& rng)
{
  if (!(cond_max >= 1.0))
    throw UsageError("random_invertible: cond_max must be >= 1");
  const CMatrix u = haar_unitary(n, rng);
  const CMatrix v = haar_unitary(n, rng);
  RVector s(n);
  const double span = std::log(cond_max);
  for (Index i = 0; i < n; ++i)
    s(i) = std::exp(-span * rng.uniform());
  s(0) = 1.0;
  if (n > 1)
    s(n - 1) = 1.0 / cond_max;
  return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

CMatrix random_low_rank(Index n, Index k, Stream& rng)
{
  if (k < 0 || k > n)
    throw UsageError("random_low_rank: rank out of range");
  if (k == 0)
    return CMatrix::Zero(n, n);
  return ginibre(n, k, rng) * ginibre(k, n, rng);
}

CMatrix conditioned_low_rank(Index n, Index k, Stream& rng, double lo, double hi)
{
  if (k < 0 || k > n)
    throw UsageError("conditioned_low_rank: rank out of range");
  const CMatrix u = haar_unitary(n, rng);
  const CMatrix v = haar_unitary(n, rng);
  RVector s = RVector::Zero(n);
  for (Index i = 0; i < k; ++i)
    s(i) = rng.uniform(lo, hi);
  return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

CMatrix nilpotent_upper(Index n, Stream& rng)
{
  CMatrix x = ginibre(n, rng);
  x.triangularView<Eigen::Lower>().setZero();
  return x;
}

CMatrix random_idempotent(Index n, Index k, Stream& rng)
{
  const CMatrix p = random_projection(n, k, rng);
  const CMatrix q = CMatrix::Identity(n, n) - p;
  return p + p * ginibre(n, rng) * q;
}

CMatrix positive_diag(Index n, Stream& rng)
{
  CMatrix d = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    d(i, i) = rng.uniform(0.5, 2.0);
  return d;
}

CMatrix example53_discretization(Index n)
{
  if (n < 1)
    throw UsageError("example53_discretization: n must be positive");
  CMatrix d = CMatrix::Zero(n, n);
  for (Index k = 1; k <= n; ++k)
    d(k - 1, k - 1) = (static_cast<double>(k) - 0.5) / static_cast<double>(n);
  return d;
}

}  // namespace fkrank
