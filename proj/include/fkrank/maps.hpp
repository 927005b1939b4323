#pragma once

// (Conjugate-)linear maps on M_n stored as n^2 x n^2 operators on the
// column-major vectorization, the canonical forms a J(x) b, and the
// preservation checkers.

#include <cstdint>
#include <optional>
#include <string>

#include "fkrank/matcore.hpp"
#include "fkrank/random.hpp"
#include "fkrank/regring.hpp"

namespace fkrank {

enum class MapKind { linear, conjugate_linear };

inline MapKind operator^(MapKind a, MapKind b)
{
  return a == b ? MapKind::linear : MapKind::conjugate_linear;
}

/// Column-major vec(x).
CVector vec(const CMatrix& x);
/// Inverse of vec for an n x n matrix.
CMatrix unvec(const CVector& v, Index n);

class MatrixMap {
 public:
  /// apply(x) = op vec(x) for linear kind and op vec(conj(x)) otherwise.
  MatrixMap(Index n, MapKind kind, CMatrix op);

  static MatrixMap identity(Index n);
  static MatrixMap transpose(Index n);
  /// Entrywise complex conjugation.
  static MatrixMap conjugation(Index n);
  /// L_a(x) = a x
  static MatrixMap left_multiplication(const CMatrix& a);
  /// R_b(x) = x b
  static MatrixMap right_multiplication(const CMatrix& b);

  Index order() const noexcept { return n_; }
  MapKind kind() const noexcept { return kind_; }
  bool is_linear() const noexcept { return kind_ == MapKind::linear; }
  const CMatrix& op() const noexcept { return op_; }

  CMatrix apply(const CMatrix& x) const;
  CMatrix operator()(const CMatrix& x) const { return apply(x); }

  /// numerical_rank(op) == n^2
  bool is_bijective() const;

 private:
  Index n_;
  MapKind kind_;
  CMatrix op_;
};

/// f o g
MatrixMap compose(const MatrixMap& f, const MatrixMap& g);
MatrixMap invert(const MatrixMap& f);

enum class JordanKind { identity, transpose };

/// x -> a J(x) b, with J the identity or transpose, optionally followed by
/// entrywise conjugation.
struct MapForm {
  CMatrix a;
  CMatrix b;
  JordanKind jordan = JordanKind::identity;
  bool conjugated = false;

  CMatrix apply(const CMatrix& x) const;
};

MatrixMap from_form(const MapForm& form);

/// Probe family for the sampling checkers. The structured part (matrix units
/// and all pairwise sums) is always deterministic; `random_count` extra
/// samples come from `seed`.
struct ProbeSet {
  Index random_count = 64;
  std::uint64_t seed = 0;
  bool structured = true;
  /// Relative rank tolerance applied to images of probes.
  double rank_tol = 1e-9;
};

inline constexpr double kDetTol = 1e-8;
inline constexpr double kMultiplicativeTol = 1e-8;

/// Outcome of a sampling check. `pass` is only probabilistic; a failure
/// carries the witness (and second witness for pairs).
struct Verdict {
  bool pass = true;
  std::optional<CMatrix> witness;
  std::optional<CMatrix> witness_pair;
  std::string detail;
  std::uint64_t seed = 0;
  Index probes_checked = 0;
  double worst = 0.0;
};

/// Structured probe family: every e_ij and every e_ij + e_kl.
template <typename Visit>
bool for_each_structured_probe(Index n, Visit&& visit)
{
  const Index m = n * n;
  for (Index a = 0; a < m; ++a)
    if (!visit(matrix_unit(n, a % n, a / n)))
      return false;
  for (Index a = 0; a < m; ++a)
    for (Index b = a + 1; b < m; ++b) {
      CMatrix z = matrix_unit(n, a % n, a / n);
      z(b % n, b / n) += 1.0;
      if (!visit(z))
        return false;
    }
  return true;
}

/// rank(f(z)) == rank(z) on the probe family (equivalent to the rank-metric
/// isometry condition by additivity). Throws NonBijective for singular maps.
Verdict is_rank_isometry(const MatrixMap& f, const ProbeSet& probes);

/// |det f(x) - det x| <= 1e-8 max(1, det x) on invertible probes, and
/// singular probes map to singular matrices. Conjugate-linear maps are
/// rejected with UsageError unless `allow_conjugate`.
Verdict is_det_preserving(const MatrixMap& f, const ProbeSet& probes, bool allow_conjugate = false);

enum class Multiplicativity { iso, anti, neither };

struct MultiplicativityReport {
  Multiplicativity classification = Multiplicativity::neither;
  double iso_residual = 0.0;   // worst ||f(xy) - f(x) f(y)|| / scale
  double anti_residual = 0.0;  // worst ||f(xy) - f(y) f(x)|| / scale
  std::optional<CMatrix> witness_x;
  std::optional<CMatrix> witness_y;
  std::uint64_t seed = 0;
};

/// Classifies f as a homomorphism, an anti-homomorphism or neither on random
/// pairs. Requires n >= 2 and a bijective f.
MultiplicativityReport is_multiplicative(const MatrixMap& f, const ProbeSet& probes);

/// (l(f(p)), r(f(p)))
Supports support_image(const MatrixMap& f, const Projection& p, double rank_tol = 1e-9);

const char* to_string(MapKind kind);
const char* to_string(JordanKind kind);
const char* to_string(Multiplicativity m);

}  // namespace fkrank
