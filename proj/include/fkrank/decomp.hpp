#pragma once

// Certification and canonical decomposition x -> a J(x) b of rank-metric
// isometries and determinant-preserving bijections of M_n.

#include <optional>
#include <string>

#include "fkrank/maps.hpp"

namespace fkrank {

enum class Classification { isomorphism, anti_isomorphism, not_an_isometry, not_bijective };

enum class DecomposeMode { rank_isometry, det_preserving };

struct DecompositionResult {
  Classification classification = Classification::not_bijective;
  std::optional<MapForm> form;
  /// max over matrix units of ||from_form(form)(e_ij) - f(e_ij)||_F / max(1, ||f(e_ij)||_F)
  double residual = 0.0;
  std::optional<CMatrix> witness;
  std::optional<CMatrix> witness_pair;
  std::string detail;
  std::uint64_t seed = 0;
};

inline constexpr double kReconstructionTol = 1e-8;
/// Consistency cut inside skolem_noether, applied to the normalized map whose
/// rounding grows with cond(f(1)); the final check is kReconstructionTol on f.
inline constexpr double kConjugationTol = 1e-6;

struct UnitalNormalization {
  MatrixMap unital;  // R_{c^{-1}} o f
  CMatrix c;         // f(1)
};

/// Throws NotAnIsometry (witness: the identity) when f(1) is singular.
UnitalNormalization normalize_unital(const MatrixMap& f, double rank_tol = 1e-9);

/// Invertible s with f(x) = s x s^{-1} for a unital automorphism f of M_n,
/// recovered by transporting a column of f(e_11) with the images f(e_j1).
/// Gauge: ||s||_F = 1 and the first nonzero entry (row-major) is positive real.
CMatrix skolem_noether(const MatrixMap& f);

/// Scale so that ||a||_F = 1 with its first nonzero entry (row-major scan)
/// positive real; b absorbs the inverse factor.
void fix_gauge(CMatrix& a, CMatrix& b);

DecompositionResult decompose(const MatrixMap& f, DecomposeMode mode, const ProbeSet& probes = {});

/// Searches the structured probe family for a rank or determinant
/// violation. Throws NonBijective for singular maps.
std::optional<CMatrix> reject_probe(const MatrixMap& f, const ProbeSet& probes = {});

/// max_ij ||g(e_ij) - f(e_ij)||_F / max(1, ||f(e_ij)||_F)
double basis_residual(const MatrixMap& f, const MapForm& form);

const char* to_string(Classification c);

}  // namespace fkrank
