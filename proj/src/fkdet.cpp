#include "fkrank/fkdet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <functional>
#include <numeric>

namespace fkrank {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mean_log(const RVector& s, double shift)
{
  double total = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    total += std::log(s(i) + shift);
  return total / static_cast<double>(s.size());
}

CMatrix shifted(const CMatrix& x, Complex lambda)
{
  CMatrix y = x;
  y.diagonal().array() -= lambda;
  return y;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

// ---------------------------------------------------------------------------
// Determinants

double fk_logdet(const CMatrix& x, double rank_tol)
{
  const RVector s = singular_values(x);
  if (rank_from_singular_values(s, rank_tol) < x.rows())
    return kNegInf;
  return mean_log(s, 0.0);
}

double fk_logdet(const CMatrix& x) { return fk_logdet(x, default_rank_tol(x.rows())); }

double fk_det(const CMatrix& x, double rank_tol)
{
  const double l = fk_logdet(x, rank_tol);
  return l == kNegInf ? 0.0 : std::exp(l);
}

double fk_det(const CMatrix& x) { return fk_det(x, default_rank_tol(x.rows())); }

double fk_logdet_eps(const CMatrix& x, double eps)
{
  if (!(eps > 0.0))
    throw UsageError("fk_det_eps: eps must be positive");
  return mean_log(singular_values(x), eps);
}

double fk_det_eps(const CMatrix& x, double eps) { return std::exp(fk_logdet_eps(x, eps)); }

double log_norm(const CMatrix& x)
{
  const RVector s = singular_values(x);
  double total = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    total += std::log1p(s(i));
  return total / static_cast<double>(s.size());
}

double ldet_at(const CMatrix& x, Complex lambda) { return fk_logdet(shifted(x, lambda)); }

// ---------------------------------------------------------------------------
// Brown measure

BrownMeasure::BrownMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms))
{
  if (atoms_.empty())
    throw UsageError("BrownMeasure: no atoms");
  std::int64_t den = 1;
  for (Atom& a : atoms_) {
    if (a.num <= 0 || a.den <= 0)
      throw UsageError("BrownMeasure: weights must be positive fractions");
    const std::int64_t g = std::gcd(a.num, a.den);
    a.num /= g;
    a.den /= g;
    den = lcm64(den, a.den);
  }
  std::int64_t total = 0;
  for (const Atom& a : atoms_)
    total += a.num * (den / a.den);
  if (total != den)
    throw UsageError("BrownMeasure: weights do not sum to one");
}

BrownMeasure BrownMeasure::from_eigenvalues(const CVector& eigenvalues)
{
  const auto n = static_cast<std::int64_t>(eigenvalues.size());
  if (n == 0)
    throw UsageError("BrownMeasure: empty spectrum");
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const auto re = static_cast<std::int64_t>(std::llround(eigenvalues(i).real() * 1e10));
    const auto im = static_cast<std::int64_t>(std::llround(eigenvalues(i).imag() * 1e10));
    ++counts[{re, im}];
  }
  std::vector<Atom> atoms;
  atoms.reserve(counts.size());
  for (const auto& [key, count] : counts)
    atoms.push_back({Complex(static_cast<double>(key.first) * 1e-10,
                             static_cast<double>(key.second) * 1e-10),
                     count, n});
  return BrownMeasure(std::move(atoms));
}

std::int64_t BrownMeasure::common_denominator() const
{
  std::int64_t den = 1;
  for (const Atom& a : atoms_)
    den = lcm64(den, a.den);
  return den;
}

std::vector<Complex> BrownMeasure::expanded(std::int64_t denominator) const
{
  std::vector<Complex> out;
  for (const Atom& a : atoms_) {
    if (denominator % a.den != 0)
      throw UsageError("BrownMeasure::expanded: denominator incompatible with weights");
    const std::int64_t copies = a.num * (denominator / a.den);
    out.insert(out.end(), static_cast<std::size_t>(copies), a.location);
  }
  return out;
}

BrownMeasure BrownMeasure::combine(const BrownMeasure& a, std::int64_t num_a, const BrownMeasure& b,
                                   std::int64_t num_b)
{
  const std::int64_t den = num_a + num_b;
  if (num_a < 0 || num_b < 0 || den <= 0)
    throw UsageError("BrownMeasure::combine: invalid coefficients");
  std::vector<Atom> atoms;
  for (const Atom& x : a.atoms())
    if (num_a > 0)
      atoms.push_back({x.location, x.num * num_a, x.den * den});
  for (const Atom& x : b.atoms())
    if (num_b > 0)
      atoms.push_back({x.location, x.num * num_b, x.den * den});
  return BrownMeasure(std::move(atoms));
}

BrownMeasure brown_measure(const CMatrix& x) { return BrownMeasure::from_eigenvalues(schur(x).eigenvalues); }

namespace {

/// Kuhn's augmenting-path matching on the graph of edges with cost <= limit.
bool perfect_matching_within(const std::vector<std::vector<double>>& cost, double limit)
{
  const std::size_t n = cost.size();
  std::vector<int> match_right(n, -1);
  std::vector<char> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cost[i][j] > limit || seen[j])
        continue;
      seen[j] = 1;
      if (match_right[j] < 0 || augment(static_cast<std::size_t>(match_right[j]))) {
        match_right[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    seen.assign(n, 0);
    if (!augment(i))
      return false;
  }
  return true;
}

}  // namespace

double matching_distance(const BrownMeasure& a, const BrownMeasure& b)
{
  const std::int64_t den = lcm64(a.common_denominator(), b.common_denominator());
  const std::vector<Complex> pa = a.expanded(den);
  const std::vector<Complex> pb = b.expanded(den);
  if (pa.size() != pb.size())
    return std::numeric_limits<double>::infinity();
  const std::size_t n = pa.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  std::vector<double> candidates;
  candidates.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cost[i][j] = std::abs(pa[i] - pb[j]);
      candidates.push_back(cost[i][j]);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (perfect_matching_within(cost, candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return candidates[lo];
}

bool measures_match(const BrownMeasure& a, const BrownMeasure& b, double tol)
{
  return matching_distance(a, b) <= tol;
}

// ---------------------------------------------------------------------------
// Grid Laplacian

Complex GridSpec::cell_center(Index i_re, Index i_im) const
{
  const double h = step();
  return center + Complex(-half_width + (static_cast<double>(i_re) + 0.5) * h,
                          -half_width + (static_cast<double>(i_im) + 0.5) * h);
}

GridMeasure brown_from_grid(const CMatrix& x, const GridSpec& grid)
{
  require_square(x, "brown_from_grid");
  if (grid.cells < 3 || !(grid.half_width > 0.0))
    throw UsageError("brown_from_grid: need at least 3 cells and a positive width");
  const double h = grid.step();
  const CVector spectrum = schur(x).eigenvalues;
  for (Index i = 0; i < spectrum.size(); ++i) {
    const Complex d = spectrum(i) - grid.center;
    const double reach = grid.half_width - 2.0 * h;
    if (std::abs(d.real()) > reach || std::abs(d.imag()) > reach)
      throw UsageError("brown_from_grid: grid does not cover the spectrum with a two-cell margin");
  }

  // Sub-lattice points sitting on an eigenvalue get the lattice Green's
  // function value log(h) - pi/2 in place of -infinity.
  const Index k = std::max<Index>(grid.refine, 1);
  const double hs = h / static_cast<double>(k);
  const double floor_value = std::log(hs) - M_PI / 2.0;
  const Index m = grid.cells * k;
  const Complex origin = grid.cell_center(0, 0) - Complex(h / 2.0, h / 2.0);
  const double inv_n = 1.0 / static_cast<double>(spectrum.size());
  Eigen::MatrixXd phi(m + 2, m + 2);
  for (Index a = 0; a < m + 2; ++a)
    for (Index b = 0; b < m + 2; ++b) {
      const Complex lambda = origin + hs * Complex(static_cast<double>(a) - 0.5, static_cast<double>(b) - 0.5);
      double v = 0.0;
      for (Index i = 0; i < spectrum.size(); ++i)
        v += std::max(std::log(std::abs(spectrum(i) - lambda)), floor_value);
      phi(a, b) = v * inv_n;
    }

  GridMeasure out;
  out.grid = grid;
  out.mass = Eigen::MatrixXd::Zero(grid.cells, grid.cells);
  for (Index a = 1; a <= m; ++a)
    for (Index b = 1; b <= m; ++b) {
      const double lap = phi(a + 1, b) + phi(a - 1, b) + phi(a, b + 1) + phi(a, b - 1) - 4.0 * phi(a, b);
      out.mass((a - 1) / k, (b - 1) / k) += lap / (2.0 * M_PI);
    }
  for (Index a = 0; a < grid.cells; ++a)
    for (Index b = 0; b < grid.cells; ++b)
      if (out.mass(a, b) < 0.0) {
        out.clipped -= out.mass(a, b);
        out.mass(a, b) = 0.0;
      }
  out.total = out.mass.sum();
  return out;
}

// ---------------------------------------------------------------------------
// Haagerup-Schultz projections

HSProjectionResult hs_projection(const CMatrix& x, const RegionPredicate& region)
{
  require_square(x, "hs_projection");
  const Index n = x.rows();
  const auto sr = schur(x);

  std::vector<Complex> ambiguous;
  Index in_b = 0;
  for (Index i = 0; i < n; ++i) {
    if (region.boundary_distance(sr.eigenvalues(i)) < kBoundaryTol)
      ambiguous.push_back(sr.eigenvalues(i));
    if (region.contains(sr.eigenvalues(i)))
      ++in_b;
  }
  if (!ambiguous.empty())
    throw BoundaryAmbiguity(std::move(ambiguous));

  const auto ordered = schur_reorder(sr, region);
  const Index k = count_selected(ordered, region);

  HSProjectionResult out{Projection::onto_orthonormal(ordered.q.leftCols(k), n)};
  out.selected = k;
  out.order = n;
  out.trace_p = out.p.trace();
  out.mu_b = static_cast<double>(in_b) / static_cast<double>(n);
  const CMatrix& p = out.p.matrix();
  out.invariance_residual = (x * p - p * x * p).norm();

  const auto corner_spectrum = [&](const CMatrix& basis) {
    std::vector<Complex> spectrum;
    if (basis.cols() == 0)
      return spectrum;
    const CMatrix compressed = basis.adjoint() * x * basis;
    const CVector ev = schur(compressed).eigenvalues;
    spectrum.assign(ev.data(), ev.data() + ev.size());
    return spectrum;
  };
  out.inside_spectrum = corner_spectrum(ordered.q.leftCols(k));
  out.outside_spectrum = corner_spectrum(ordered.q.rightCols(n - k));
  out.inside_ok = std::all_of(out.inside_spectrum.begin(), out.inside_spectrum.end(),
                              [&](Complex z) { return region.contains(z); });
  out.outside_ok = std::none_of(out.outside_spectrum.begin(), out.outside_spectrum.end(),
                                [&](Complex z) { return region.contains(z); });
  return out;
}

BrownSplit brown_decompose(const CMatrix& x, const Projection& p)
{
  require_square(x, "brown_decompose");
  const Index n = x.rows();
  if (p.order() != n)
    throw UsageError("brown_decompose: dimension mismatch");
  if (p.rank() == 0 || p.rank() == n)
    throw UsageError("brown_decompose: projection must be nontrivial");
  const CMatrix& pm = p.matrix();
  const double residual = (x * pm - pm * x * pm).norm();
  if (residual > kInvarianceTol * std::max(x.norm(), 1e-300))
    throw InvarianceViolation(residual);

  const CMatrix range = p.range_basis();
  const CMatrix co_range = p.complement().range_basis();
  const CMatrix corner = range.adjoint() * x * range;
  const CMatrix rest = co_range.adjoint() * x * co_range;
  return {brown_measure(corner), brown_measure(rest), p.rank()};
}

double spectral_radius(const CMatrix& x)
{
  const CVector ev = schur(x).eigenvalues;
  return ev.cwiseAbs().maxCoeff();
}

bool quasinilpotent_check(const CMatrix& x, double tol) { return spectral_radius(x) <= tol; }

}  // namespace fkrank
