#include <doctest.h>

#include "fkrank/matcore.hpp"
#include "fkrank/random.hpp"
#include "fkrank/region.hpp"
#include "oracles.hpp"

using namespace fkrank;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d)
{
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_SUITE("matcore")
{
  TEST_CASE("svd of small matrices")
  {
    const SvdResult<double> r = svd(mat2(0, 2, 0, 0));
    CHECK(r.s(0) == doctest::Approx(2.0));
    CHECK(std::abs(r.s(1)) < 1e-15);

    const SvdResult<double> id = svd(CMatrix::Identity(2, 2));
    CHECK(id.s(0) == doctest::Approx(1.0));
    CHECK(id.s(1) == doctest::Approx(1.0));
    CHECK((id.u * id.v.adjoint() - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }

  TEST_CASE("svd reconstructs a Ginibre matrix")
  {
    Stream rng(11);
    const CMatrix x = ginibre(8, rng);
    const SvdResult<double> r = svd(x);
    CHECK((r.reconstruct() - x).norm() <= 1e-12 * x.norm());
    CHECK(unitarity_defect(r.u) < 1e-12);
    CHECK(unitarity_defect(r.v) < 1e-12);
  }

  TEST_CASE("polar decomposition")
  {
    const CMatrix x = mat2(0, 2, 0, 0);
    const auto p = fkrank::polar(x);
    CHECK((p.v - mat2(0, 1, 0, 0)).norm() < 1e-12);
    CHECK((p.absx - mat2(0, 0, 0, 2)).norm() < 1e-12);
    CHECK((p.v * p.absx - x).norm() < 1e-12);

    Stream rng(3);
    const CMatrix u = haar_unitary(4, rng);
    const auto pu = fkrank::polar(u);
    CHECK((pu.v - u).norm() < 1e-10);
    CHECK((pu.absx - CMatrix::Identity(4, 4)).norm() < 1e-10);

    const CMatrix g = ginibre(4, rng);
    const CMatrix h = g * g.adjoint() + CMatrix::Identity(4, 4);
    const auto ph = fkrank::polar(h);
    CHECK((ph.absx - h).norm() < 1e-10 * h.norm());
    CHECK((ph.v - CMatrix::Identity(4, 4)).norm() < 1e-10);

    const auto full = fkrank::polar(CMatrix(mat2(0, 2, 0, 0)), true);
    CHECK(unitarity_defect(full.v) < 1e-12);
    CHECK((full.v * full.absx - x).norm() < 1e-12);
  }

  TEST_CASE("schur examples")
  {
    const CMatrix d = mat2(3, 0, 0, 1);
    const SchurResult<double> sd = schur(d);
    std::vector<double> ev = {sd.eigenvalues(0).real(), sd.eigenvalues(1).real()};
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));

    const CMatrix nil = mat2(0, 1, 0, 0);
    const SchurResult<double> sn = schur(nil);
    CHECK(std::abs(sn.eigenvalues(0)) < 1e-15);
    CHECK(std::abs(sn.eigenvalues(1)) < 1e-15);
    CHECK((sn.q * sn.t * sn.q.adjoint() - nil).norm() < 1e-15);
  }

  TEST_CASE("schur reconstruction and spectrum against an eigen-solver")
  {
    Stream rng(5);
    const CMatrix x = ginibre(8, rng);
    const SchurResult<double> s = schur(x);
    CHECK((s.q * s.t * s.q.adjoint() - x).norm() <= 1e-10 * x.norm());
    CHECK(s.t.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() == 0.0);
    const std::vector<Complex> mine(s.eigenvalues.data(), s.eigenvalues.data() + 8);
    CHECK(oracle::bottleneck(mine, oracle::eigenvalues(x)) < 1e-10);
  }

  TEST_CASE("schur reorder")
  {
    const SchurResult<double> s = schur(CMatrix(mat2(1, 0, 0, 5)));
    const auto near5 = RegionPredicate::disk(5.0, 0.5);
    const SchurResult<double> r = schur_reorder(s, near5);
    CHECK(r.eigenvalues(0).real() == doctest::Approx(5.0));
    CHECK(r.eigenvalues(1).real() == doctest::Approx(1.0));
    CHECK((r.q * r.t * r.q.adjoint() - mat2(1, 0, 0, 5)).norm() < 1e-12);

    // Already ordered: nothing moves.
    const SchurResult<double> again = schur_reorder(r, near5);
    CHECK((again.q - r.q).norm() == 0.0);

    Stream rng(17);
    const CMatrix x = ginibre(8, rng);
    const SchurResult<double> sx = schur(x);
    const auto right = RegionPredicate::halfplane(1.0, 0.0);
    const SchurResult<double> rx = schur_reorder(sx, right);
    const Index k = count_selected(sx, right);
    for (Index i = 0; i < 8; ++i)
      CHECK(right(rx.eigenvalues(i)) == (i < k));
    CHECK(unitarity_defect(rx.q) < 1e-12);
    CHECK((rx.q * rx.t * rx.q.adjoint() - x).norm() <= 1e-10 * x.norm());
    const std::vector<Complex> before(sx.eigenvalues.data(), sx.eigenvalues.data() + 8);
    const std::vector<Complex> after(rx.eigenvalues.data(), rx.eigenvalues.data() + 8);
    CHECK(oracle::bottleneck(before, after) < 1e-8);
  }

  TEST_CASE("ill-conditioned swap is reported")
  {
    SchurResult<double> s;
    s.q = CMatrix::Identity(2, 2);
    s.t = mat2(1.0, 1.0, 0.0, 1.0 + 1e-14);
    s.eigenvalues = s.t.diagonal();
    CHECK_THROWS_AS(schur_reorder(s, [](Complex z) { return z.real() > 1.0 + 5e-15; }), IllConditionedSwap);
  }

  TEST_CASE("pseudo-inverse")
  {
    CHECK((pinv(CMatrix(mat2(2, 0, 0, 0))) - mat2(0.5, 0, 0, 0)).norm() < 1e-15);
    const CMatrix x = mat2(0, 2, 0, 0);
    const CMatrix i = pinv(x);
    CHECK((i - mat2(0, 0, 0.5, 0)).norm() < 1e-15);
    CHECK((x * i - mat2(1, 0, 0, 0)).norm() < 1e-15);

    Stream rng(9);
    const CMatrix a = random_invertible(6, 1e3, rng);
    CHECK((pinv(a) - CMatrix(a.inverse())).norm() <= 1e-10 * condition_number(a));

    const CMatrix low = random_low_rank(6, 3, rng);
    const CMatrix p = pinv(low);
    CHECK((low * p * low - low).norm() < 1e-10 * low.norm());
    CHECK((p * low * p - p).norm() < 1e-10 * p.norm());
    CHECK((low * p - (low * p).adjoint()).norm() < 1e-10);
    CHECK((p * low - (p * low).adjoint()).norm() < 1e-10);
  }

  TEST_CASE("numerical rank")
  {
    CHECK(numerical_rank(CMatrix(mat2(1, 0, 0, 1e-16))) == 1);
    CHECK(numerical_rank(CMatrix::Zero(3, 3)) == 0);
    CHECK(numerical_rank(CMatrix(mat2(1, 2, 2, 4))) == 1);
    Stream rng(21);
    for (Index n : {2, 5, 9}) {
      const CMatrix a = random_invertible(n, 1e6, rng);
      CHECK(numerical_rank(a) == n);
      CHECK(condition_number(a) == doctest::Approx(1e6).epsilon(1e-6));
      for (Index k = 0; k <= n; ++k) {
        const CMatrix low = random_low_rank(n, k, rng);
        CHECK(numerical_rank(low) == oracle::rank(low, 1e-12));
      }
    }
  }

  TEST_CASE("helpers")
  {
    CHECK(normalized_trace(CMatrix::Identity(4, 4)) == Complex(1.0, 0.0));
    CHECK((hermitian_part(CMatrix(mat2(0, 2, 0, 0))) - mat2(0, 1, 1, 0)).norm() == 0.0);
    CVector spec(2);
    spec << 1.0, Complex(0, 1);
    CHECK(distance_to_spectrum(spec, 2.0) == doctest::Approx(1.0));
    CHECK(condition_number(CMatrix(mat2(1, 0, 0, 0))) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(schur(CMatrix(2, 3)), UsageError);
  }

  TEST_CASE("generators")
  {
    Stream rng(4);
    const CMatrix u = haar_unitary(4, rng);
    CHECK((u * u.adjoint() - CMatrix::Identity(4, 4)).norm() < 1e-12);
    const CMatrix p = random_projection(2, 1, rng);
    CHECK(normalized_trace(p).real() == doctest::Approx(0.5));
    CHECK((p * p - p).norm() < 1e-12);
    const CMatrix e = random_idempotent(5, 2, rng);
    CHECK((e * e - e).norm() < 1e-12 * std::max(1.0, e.squaredNorm()));
    CHECK(oracle::rank(e, 1e-12) == 2);
    const CMatrix d = example53_discretization(4);
    CHECK(d(0, 0).real() == doctest::Approx(1.0 / 8));
    CHECK(d(3, 3).real() == doctest::Approx(7.0 / 8));
    CHECK(std::abs(d(0, 1)) == 0.0);
    // Children are derived by counter, so replays agree.
    Stream a(99), b(99);
    CHECK((ginibre(3, a) - ginibre(3, b)).norm() == 0.0);
    CHECK(a.child(7).seed() == Stream(99).child(7).seed());
  }
}
