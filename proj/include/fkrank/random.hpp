#pragma once

#include <cstdint>
#include <random>

#include "fkrank/matcore.hpp"

namespace fkrank {

/// SplitMix64 finalizer; used to derive independent child seeds from a counter.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

/// Seeded random stream. Children are derived by counter, never by drawing
/// from the parent, so any trial can be replayed from (seed, counter).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  Stream child(std::uint64_t counter) const { return Stream(mix_seed(seed_, counter)); }

  double normal() { return normal_(engine_); }
  double uniform(double lo = 0.0, double hi = 1.0)
  {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
  }
  Index uniform_index(Index lo, Index hi);  // inclusive
  bool coin() { return uniform() < 0.5; }
  Complex complex_normal() { return Complex(normal(), normal()) * M_SQRT1_2; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Entries i.i.d. standard complex Gaussian.
CMatrix ginibre(Index n, Stream& rng);
CMatrix ginibre(Index rows, Index cols, Stream& rng);

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of diag(R) removed.
CMatrix haar_unitary(Index n, Stream& rng);

/// Orthogonal projection onto a Haar-random k-dimensional subspace.
CMatrix random_projection(Index n, Index k, Stream& rng);

/// u diag(s) v* with s log-uniform in [1/cond_max, 1], s_1 = 1 and s_n = 1/cond_max.
CMatrix random_invertible(Index n, double cond_max, Stream& rng);

/// Product of n x k and k x n Ginibre factors (rank k almost surely).
CMatrix random_low_rank(Index n, Index k, Stream& rng);

/// u diag(s) v* with Haar u, v and the first k singular values uniform in [lo, hi].
CMatrix conditioned_low_rank(Index n, Index k, Stream& rng, double lo = 0.5, double hi = 1.0);

/// Strictly upper triangular with Gaussian entries.
CMatrix nilpotent_upper(Index n, Stream& rng);

/// p + p g (1 - p) with p a random rank-k projection.
CMatrix random_idempotent(Index n, Index k, Stream& rng);

/// Diagonal with entries uniform in [0.5, 2].
CMatrix positive_diag(Index n, Stream& rng);

/// diag((k - 1/2) / n), k = 1..n: midpoint nodes of [0, 1].
CMatrix example53_discretization(Index n);

}  // namespace fkrank
