#pragma once

// Fuglede-Kadison determinant, Brown measure and Haagerup-Schultz
// projections at matrix scale.

#include <cstdint>
#include <vector>

#include "fkrank/matcore.hpp"
#include "fkrank/region.hpp"
#include "fkrank/regring.hpp"

namespace fkrank {

// ---------------------------------------------------------------------------
// Determinants

/// exp(mean log s_i) if x has full numerical rank, else exactly 0.
double fk_det(const CMatrix& x, double rank_tol);
double fk_det(const CMatrix& x);

/// mean log s_i, or -infinity for numerically singular x.
double fk_logdet(const CMatrix& x, double rank_tol);
double fk_logdet(const CMatrix& x);

/// exp(tau(log(|x| + eps))) for eps > 0.
double fk_det_eps(const CMatrix& x, double eps);
double fk_logdet_eps(const CMatrix& x, double eps);

/// ||x||_log = tau(log(1 + |x|))
double log_norm(const CMatrix& x);

/// log det(x - lambda)
double ldet_at(const CMatrix& x, Complex lambda);

// ---------------------------------------------------------------------------
// Brown measure

struct Atom {
  Complex location;
  std::int64_t num = 0;
  std::int64_t den = 1;

  double weight() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Finite atomic probability measure with rational weights.
class BrownMeasure {
 public:
  BrownMeasure() = default;
  /// Validates positive weights summing to exactly one; reduces fractions.
  explicit BrownMeasure(std::vector<Atom> atoms);

  /// Normalized counting measure; coordinates are rounded to 1e-10 and only
  /// exactly coinciding rounded locations are merged.
  static BrownMeasure from_eigenvalues(const CVector& eigenvalues);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Common denominator of all weights.
  std::int64_t common_denominator() const;

  /// Locations repeated by multiplicity over the common denominator.
  std::vector<Complex> expanded(std::int64_t denominator) const;

  /// Integral of f against the measure.
  template <typename F>
  double integrate(F&& f) const
  {
    double total = 0.0;
    for (const Atom& a : atoms_)
      total += a.weight() * f(a.location);
    return total;
  }

  /// Convex combination (num_a/den) a + (num_b/den) b with num_a + num_b = den.
  static BrownMeasure combine(const BrownMeasure& a, std::int64_t num_a, const BrownMeasure& b,
                              std::int64_t num_b);

 private:
  std::vector<Atom> atoms_;
};

BrownMeasure brown_measure(const CMatrix& x);

/// Bottleneck distance of the optimal matching between the two measures
/// expanded to a common denominator, so unequal weights are never matched.
double matching_distance(const BrownMeasure& a, const BrownMeasure& b);

/// Weights match exactly and every atom moves by at most tol.
bool measures_match(const BrownMeasure& a, const BrownMeasure& b, double tol = 1e-6);

/// Square lattice of cells x cells centered on `center`, side 2 * half_width.
struct GridSpec {
  Complex center{0.0, 0.0};
  double half_width = 1.0;
  Index cells = 64;
  /// Sub-lattice points per cell side; cell mass sums the sub-cell Laplacians
  /// before clipping.
  Index refine = 8;

  double step() const { return 2.0 * half_width / static_cast<double>(cells); }
  Complex cell_center(Index i_re, Index i_im) const;
};

struct GridMeasure {
  GridSpec grid;
  Eigen::MatrixXd mass;  // mass(i_re, i_im), clipped at 0
  double total = 0.0;
  double clipped = 0.0;  // magnitude of negative mass removed
};

/// (h^2 / 2 pi) times the five-point Laplacian of lambda -> log det(x - lambda),
/// accumulated per cell over the refined lattice.
GridMeasure brown_from_grid(const CMatrix& x, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Haagerup-Schultz projections

inline constexpr double kBoundaryTol = 1e-8;
inline constexpr double kInvarianceTol = 1e-8;

struct HSProjectionResult {
  Projection p;
  Index selected = 0;  // eigenvalues in B counted with multiplicity
  Index order = 0;
  double trace_p = 0.0;  // selected / order, from the projection rank
  double mu_b = 0.0;     // selected / order, from the eigenvalue count
  double invariance_residual = 0.0;  // ||x p - p x p||_F
  std::vector<Complex> inside_spectrum;
  std::vector<Complex> outside_spectrum;
  bool inside_ok = false;
  bool outside_ok = false;
};

HSProjectionResult hs_projection(const CMatrix& x, const RegionPredicate& region);

struct BrownSplit {
  BrownMeasure corner;      // of p x p on range(p)
  BrownMeasure complement;  // of q x q on range(q)
  Index rank = 0;
};

/// Splits the Brown measure of x along an x-invariant projection p. Throws
/// InvarianceViolation when ||x p - p x p||_F > 1e-8 ||x||_F.
BrownSplit brown_decompose(const CMatrix& x, const Projection& p);

double spectral_radius(const CMatrix& x);
bool quasinilpotent_check(const CMatrix& x, double tol);

}  // namespace fkrank
