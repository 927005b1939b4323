#include <doctest.h>

#include "fkrank/random.hpp"
#include "fkrank/regring.hpp"
#include "oracles.hpp"

using namespace fkrank;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d)
{
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix kE11 = mat2(1, 0, 0, 0);
const CMatrix kE22 = mat2(0, 0, 0, 1);

}  // namespace

TEST_SUITE("regring")
{
  TEST_CASE("projections snap and reject non-projections")
  {
    CMatrix nearly = kE11;
    nearly(0, 0) += 1e-13;
    const Projection p = Projection::from_matrix(nearly);
    CHECK((p.matrix() - kE11).norm() < 1e-15);
    CHECK(p.rank() == 1);
    CHECK(p.trace() == doctest::Approx(0.5));
    CHECK_THROWS_AS(Projection::from_matrix(mat2(1, 1, 0, 0)), UsageError);
    CHECK((p.complement().matrix() - kE22).norm() < 1e-15);
    CHECK(projection_leq(Projection::zero(2), p));
    CHECK(projection_leq(p, Projection::identity(2)));
    CHECK_FALSE(projection_leq(Projection::identity(2), p));
  }

  TEST_CASE("supports")
  {
    const Supports s = supports(mat2(0, 2, 0, 0));
    CHECK((s.left.matrix() - kE11).norm() < 1e-12);
    CHECK((s.right.matrix() - kE22).norm() < 1e-12);

    Stream rng(2);
    const Supports inv = supports(random_invertible(5, 1e3, rng));
    CHECK(inv.left.rank() == 5);
    CHECK(inv.right.rank() == 5);

    for (Index k = 0; k <= 6; ++k) {
      const CMatrix x = random_low_rank(6, k, rng);
      const Supports sx = supports(x);
      CHECK(sx.left.trace() == doctest::Approx(k / 6.0));
      CHECK(sx.right.trace() == doctest::Approx(k / 6.0));
      CHECK((sx.left.matrix() * x - x).norm() < 1e-10 * std::max(1.0, x.norm()));
      CHECK((x * sx.right.matrix() - x).norm() < 1e-10 * std::max(1.0, x.norm()));
    }
  }

  TEST_CASE("partial inverse identities")
  {
    const CMatrix x = mat2(0, 2, 0, 0);
    const CMatrix i = partial_inverse(x);
    CHECK((i - mat2(0, 0, 0.5, 0)).norm() < 1e-15);
    CHECK((x * i - kE11).norm() < 1e-15);
    CHECK((i * x - kE22).norm() < 1e-15);
  }

  TEST_CASE("rank metric and rank norm")
  {
    CHECK(rank_metric(kE11, CMatrix::Zero(2, 2)) == doctest::Approx(0.5));
    CHECK(rank_metric(kE11, kE11) == 0.0);
    for (Index n : {2, 3, 7}) {
      const CMatrix d = matrix_unit(n, 0, 0);
      CHECK(rank_metric(CMatrix::Identity(n, n), d) == doctest::Approx(static_cast<double>(n - 1) / n));
    }
    CHECK(rank_norm(CMatrix::Zero(3, 3)) == 0.0);
    CHECK(rank_norm(CMatrix::Identity(3, 3)) == 1.0);
  }

  TEST_CASE("singular value function and L0 norm")
  {
    const CMatrix x = mat2(3, 0, 0, 1);
    CHECK(sv_function(x, 0.0) == doctest::Approx(3.0));
    CHECK(sv_function(x, 0.49) == doctest::Approx(3.0));
    CHECK(sv_function(x, 0.5) == doctest::Approx(1.0));
    CHECK(sv_function(x, 0.99) == doctest::Approx(1.0));
    CHECK_THROWS_AS(sv_function(x, 1.0), UsageError);
    CHECK_THROWS_AS(sv_function(x, -0.1), UsageError);
    // The k = n breakpoint (t = 1, mu = 0) attains the infimum.
    CHECK(l0_norm(x) == doctest::Approx(1.0));
    CHECK(l0_norm(x) == doctest::Approx(oracle::l0_brute_force(x)));
    CHECK(l0_norm(CMatrix::Zero(2, 2)) == 0.0);
    CHECK(sv_function(CMatrix::Zero(2, 2), 0.3) == 0.0);

    Stream rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix y = 0.3 * ginibre(5, rng);
      CHECK(l0_norm(y) == doctest::Approx(oracle::l0_brute_force(y)).epsilon(1e-12));
    }
  }

  TEST_CASE("Peirce decomposition")
  {
    Stream rng(1);
    const CMatrix x = ginibre(2, rng);
    const Projection p = Projection::from_matrix(kE11);
    const PeirceBlocks b = peirce_decompose(x, p);
    CHECK(b.pxp(0, 0) == x(0, 0));
    CHECK(b.pxq(0, 1) == x(0, 1));
    CHECK(b.qxp(1, 0) == x(1, 0));
    CHECK(b.qxq(1, 1) == x(1, 1));
    CHECK(b.pxp(1, 1) == 0.0);
    CHECK((b.reconstruct() - x).norm() < 1e-15);

    const PeirceBlocks id = peirce_decompose(CMatrix::Identity(2, 2), p);
    CHECK((id.pxp - kE11).norm() < 1e-15);
    CHECK(id.pxq.norm() == 0.0);
    CHECK((id.qxq - kE22).norm() < 1e-15);

    const PeirceBlocks full = peirce_decompose(x, Projection::identity(2));
    CHECK((full.pxp - x).norm() == 0.0);
    CHECK(full.qxq.norm() == 0.0);
  }

  TEST_CASE("idempotent split and conjugator")
  {
    const CMatrix e = mat2(1, 1, 0, 0);
    const IdempotentSplit s = idempotent_split(e);
    CHECK((s.p.matrix() - kE11).norm() < 1e-12);
    CHECK((s.u - mat2(0, 1, 0, 0)).norm() < 1e-12);
    const Conjugator c = projection_conjugator(e);
    CHECK((c.a - mat2(1, 1, 0, 1)).norm() < 1e-12);
    CHECK((c.a * e * c.a_inverse - kE11).norm() < 1e-12);

    const IdempotentSplit sp = idempotent_split(kE11);
    CHECK(sp.u.norm() < 1e-15);
    CHECK((projection_conjugator(kE11).a - CMatrix::Identity(2, 2)).norm() < 1e-15);

    Stream rng(6);
    for (Index k = 0; k <= 6; ++k) {
      const CMatrix f = random_idempotent(6, k, rng);
      const Conjugator cf = projection_conjugator(f);
      CHECK((cf.a * f * cf.a_inverse - idempotent_split(f).p.matrix()).norm() < 1e-10);
      CHECK(idempotent_rank(f) == k);
    }
    CHECK_THROWS_AS(idempotent_split(mat2(1, 0, 0, 0.5)), IdempotencyViolation);
  }

  TEST_CASE("support normalizers")
  {
    const CMatrix x = mat2(0, 2, 0, 0);
    const SupportNormalizers nb = support_normalizers(x);
    CHECK((nb.a - mat2(0, 1, 0.5, 0)).norm() < 1e-12);
    CHECK((x * nb.a - kE11).norm() < 1e-12);
    CHECK((nb.b * x - kE22).norm() < 1e-12);

    Stream rng(12);
    const CMatrix inv = random_invertible(4, 1e2, rng);
    const SupportNormalizers ni = support_normalizers(inv);
    CHECK((inv * ni.a - CMatrix::Identity(4, 4)).norm() < 1e-10);

    const CMatrix r1 = random_low_rank(4, 1, rng);
    const SupportNormalizers n1 = support_normalizers(r1);
    const Supports s1 = supports(r1);
    CHECK((r1 * n1.a - s1.left.matrix()).norm() < 1e-10);
    CHECK((n1.b * r1 - s1.right.matrix()).norm() < 1e-10);
    CHECK(std::isfinite(condition_number(n1.a)));
    CHECK_THROWS_AS(support_normalizers(CMatrix::Zero(3, 3)), UsageError);
  }

  TEST_CASE("meet and join")
  {
    const Projection p = Projection::from_matrix(kE11);
    const Projection q = Projection::from_matrix(kE22);
    const MeetJoin pq = proj_meet_join(p, q);
    CHECK((pq.join.matrix() - CMatrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(pq.meet.rank() == 0);
    const MeetJoin pp = proj_meet_join(p, p);
    CHECK((pp.meet.matrix() - kE11).norm() < 1e-12);
    CHECK((pp.join.matrix() - kE11).norm() < 1e-12);
    CHECK_FALSE(pp.ambiguous);

    Stream rng(30);
    for (int trial = 0; trial < 10; ++trial) {
      CMatrix b1(4, 2), b2(4, 2);
      const CMatrix shared = ginibre(4, 1, rng);
      b1 << shared, ginibre(4, 1, rng);
      b2 << shared, ginibre(4, 1, rng);
      const CMatrix q1 = Eigen::HouseholderQR<CMatrix>(b1).householderQ() * CMatrix::Identity(4, 2);
      const CMatrix q2 = Eigen::HouseholderQR<CMatrix>(b2).householderQ() * CMatrix::Identity(4, 2);
      const Projection p1 = Projection::onto_orthonormal(q1, 4);
      const Projection p2 = Projection::onto_orthonormal(q2, 4);
      const MeetJoin mj = proj_meet_join(p1, p2);
      CHECK(mj.join.rank() + mj.meet.rank() == p1.rank() + p2.rank());
      CHECK(mj.meet.rank() == 1);
      CHECK((mj.meet.matrix() * shared - shared).norm() < 1e-10 * shared.norm());
    }
  }
}
