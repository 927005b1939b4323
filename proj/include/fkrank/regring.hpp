#pragma once

// Rank-metric layer over M_n: projections, supports, partial inverse, rank
// metric, singular value function, Peirce blocks, idempotent normalization
// and the invertible normalizers x a = l(x), b x = r(x).

#include <optional>

#include "fkrank/matcore.hpp"

namespace fkrank {

/// Orthogonal projection, stored snapped to an exact Hermitian idempotent.
class Projection {
 public:
  /// Validates ||p^2 - p||_F and ||p - p*||_F against `tol`, then rounds the
  /// spectrum of the Hermitian part to {0, 1}.
  static Projection from_matrix(const CMatrix& m, double tol = 1e-10);

  /// Projection onto the span of orthonormal columns.
  static Projection onto_orthonormal(const CMatrix& basis, Index n);

  static Projection zero(Index n);
  static Projection identity(Index n);

  const CMatrix& matrix() const noexcept { return m_; }
  Index order() const noexcept { return m_.rows(); }
  Index rank() const noexcept { return rank_; }
  /// tau(p) = rank / n
  double trace() const noexcept { return static_cast<double>(rank_) / static_cast<double>(order()); }

  /// 1 - p
  Projection complement() const;
  /// Orthonormal basis of the range (n x rank).
  CMatrix range_basis() const;

 private:
  Projection(CMatrix m, Index rank) : m_(std::move(m)), rank_(rank) {}
  CMatrix m_;
  Index rank_ = 0;
};

/// ||p - q||_F
double projection_distance(const Projection& p, const Projection& q);

/// p <= q, i.e. ||q p - p||_F <= tol.
bool projection_leq(const Projection& p, const Projection& q, double tol = 1e-8);

struct Supports {
  Projection left;   // l(x)
  Projection right;  // r(x)
};

Supports supports(const CMatrix& x, double tol);
Supports supports(const CMatrix& x);

/// i(x): x i(x) = l(x), i(x) x = r(x).
CMatrix partial_inverse(const CMatrix& x, double tol);
CMatrix partial_inverse(const CMatrix& x);

/// rank(x - y) / n
double rank_metric(const CMatrix& x, const CMatrix& y, double tol);
double rank_metric(const CMatrix& x, const CMatrix& y);

/// ||x||_S = rank(x) / n
double rank_norm(const CMatrix& x, double tol);
double rank_norm(const CMatrix& x);

/// mu(t; x) = s_{floor(t n) + 1}, t in [0, 1).
double sv_function(const CMatrix& x, double t);

/// ||x||_{L0} = inf_{t > 0} { t + mu(t; x) }, evaluated on the n + 1 breakpoints.
double l0_norm(const CMatrix& x);

struct PeirceBlocks {
  Projection p;
  CMatrix pxp, pxq, qxp, qxq;

  CMatrix reconstruct() const { return pxp + pxq + qxp + qxq; }
};

PeirceBlocks peirce_decompose(const CMatrix& x, const Projection& p);

/// e = p + u with p = l(e) and u in p M (1 - p).
struct IdempotentSplit {
  Projection p;
  CMatrix u;
};

inline constexpr double kIdempotencyTol = 1e-8;

/// ||e^2 - e||_F
double idempotency_residual(const CMatrix& e);

/// Rank of a near-idempotent: its nonzero singular values are >= 1, so the
/// cut sits at 1/2 regardless of scale.
Index idempotent_rank(const CMatrix& e);

IdempotentSplit idempotent_split(const CMatrix& e);

/// a = l(e) + u + (1 - l(e)) with a e a^{-1} = l(e).
struct Conjugator {
  CMatrix a;
  CMatrix a_inverse;  // l(e) - u + (1 - l(e))
};

Conjugator projection_conjugator(const CMatrix& e);

/// a = b = w + i(x), w the partial isometry from 1 - l(x) onto 1 - r(x).
struct SupportNormalizers {
  CMatrix a;  // x a = l(x)
  CMatrix b;  // b x = r(x)
};

SupportNormalizers support_normalizers(const CMatrix& x, double tol);
SupportNormalizers support_normalizers(const CMatrix& x);

struct MeetJoin {
  Projection meet;
  Projection join;
  /// Smallest relative singular-value gap at the two rank cuts; small values
  /// mean the lattice operation is numerically ambiguous.
  double rank_gap = 0.0;
  bool ambiguous = false;
};

inline constexpr double kAmbiguousGap = 1e-6;

MeetJoin proj_meet_join(const Projection& p, const Projection& q);

}  // namespace fkrank
