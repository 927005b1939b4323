#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's decompositions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// |det x|^(1/n) through an LU factorization.
inline double fk_det(const Matrix& x)
{
  const double d = std::abs(Eigen::PartialPivLU<Matrix>(x).determinant());
  return std::pow(d, 1.0 / static_cast<double>(x.rows()));
}

/// Rank by one-sided Jacobi SVD with a relative cut.
inline Eigen::Index rank(const Matrix& x, double rel_tol)
{
  const Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(x).singularValues();
  if (s.size() == 0 || s(0) <= 1e-300)
    return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    r += s(i) > rel_tol * s(0) ? 1 : 0;
  return r;
}

inline std::vector<Complex> eigenvalues(const Matrix& x)
{
  Eigen::ComplexEigenSolver<Matrix> es(x, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Bottleneck distance between two equal-size multisets by exhaustive
/// permutation search (small sizes only).
inline double bottleneck(const std::vector<Complex>& a, std::vector<Complex> b)
{
  if (a.size() != b.size())
    return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Greedy nearest matching; exact for well-separated multisets.
inline double greedy_match(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
  if (a.size() != b.size())
    return std::numeric_limits<double>::infinity();
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  for (const Complex z : a) {
    std::size_t best = b.size();
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!used[j] && (best == b.size() || std::abs(b[j] - z) < std::abs(b[best] - z)))
        best = j;
    used[best] = 1;
    worst = std::max(worst, std::abs(b[best] - z));
  }
  return worst;
}

/// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels)
{
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i)
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// min over k = 0..n of k/n + s_k with s sorted decreasingly and s_n = 0.
inline double l0_brute_force(const Matrix& x)
{
  Eigen::VectorXd s = Eigen::JacobiSVD<Matrix>(x).singularValues();
  const auto n = s.size();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k <= n; ++k)
    best = std::min(best, static_cast<double>(k) / n + (k < n ? s(k) : 0.0));
  return best;
}

inline Matrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j)
{
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

}  // namespace oracle
