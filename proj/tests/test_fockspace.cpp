#include <cmath>

#include <doctest.h>

#include "critmet/errors.hpp"
#include "critmet/fockspace.hpp"
#include "critmet/models.hpp"

using namespace critmet;

TEST_CASE("ladder matrix elements at n_max = 2")
{
    const FockBasis b(2);
    const LadderOps ops = build_ladder_ops(b);
    const CMatrix& a = ops.a.matrix();
    CHECK(a(0, 1) == cplx(1.0));
    CHECK(std::abs(a(1, 2) - std::sqrt(2.0)) < 1e-15);
    int nonzero = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a(i, j) != cplx(0.0)) ++nonzero;
    CHECK(nonzero == 2);
}

TEST_CASE("number operator eigenvalues")
{
    for (int n_max = 4; n_max <= 24; n_max += 5) {
        const FockBasis b(n_max);
        const LadderOps ops = build_ladder_ops(b);
        for (int n = 0; n <= n_max; ++n) {
            const CVector v = ops.n.matrix() * fock_state(b, n).amp;
            CHECK((v - double(n) * fock_state(b, n).amp).norm() == 0.0);
        }
    }
}

TEST_CASE("canonical commutator away from the cutoff row")
{
    const FockBasis b(12);
    const LadderOps ops = build_ladder_ops(b);
    const CMatrix c = ops.a.matrix() * ops.adag.matrix() - ops.adag.matrix() * ops.a.matrix() -
                      CMatrix::Identity(b.dim(), b.dim());
    CHECK(c.topRows(b.n_max()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("squeeze operator")
{
    const FockBasis b(60);
    CHECK((build_squeeze_op(b, 0.0).matrix() - CMatrix::Identity(61, 61)).norm() < 1e-14);

    const CVector v = build_squeeze_op(b, -0.1683).matrix().col(0);
    for (int n = 1; n <= 60; n += 2) CHECK(std::abs(v(n)) == 0.0);

    const PureState sv(b, build_squeeze_op(b, 0.5).matrix().col(0));
    CHECK(boson_moments(sv).mean_n == doctest::Approx(std::pow(std::sinh(0.5), 2)).epsilon(1e-6));
    CHECK(parity_expectation(sv) == doctest::Approx(1.0).epsilon(1e-12));

    const CMatrix S = build_squeeze_op(b, 0.8).matrix();
    CHECK((S.adjoint() * S - CMatrix::Identity(61, 61)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("squeezing truncation rule")
{
    CHECK(n_min_for_squeezing(0.0) == 12);
    CHECK(n_min_for_squeezing(1.0) == int(std::ceil(12.0 * std::exp(2.0))));
    CHECK_THROWS_AS(build_squeeze_op(FockBasis(10), 2.0), TruncationError);
}

TEST_CASE("displacement operator")
{
    const FockBasis b(40);
    CHECK((build_displacement_op(b, 0.0).matrix() - CMatrix::Identity(41, 41)).norm() < 1e-14);
    const PureState c1(b, build_displacement_op(b, 1.0).matrix().col(0));
    CHECK(std::abs(boson_moments(c1).mean_n - 1.0) < 1e-8);

    const FockBasis b2(60);
    const PureState c2(b2, build_displacement_op(b2, cplx(0.0, 2.0)).matrix().col(0));
    CHECK(std::abs(boson_moments(c2).mean_p - 2.0 * std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(boson_moments(c2).mean_x) < 1e-10);
}

TEST_CASE("hermitian eigensolver")
{
    const FockBasis b(2);
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = 1.0;
    m(2, 2) = 2.0;
    const EigenSystem es = eig_hermitian(ComplexOperator(b, m));
    CHECK(es.values(0) == doctest::Approx(1.0));
    CHECK(es.values(1) == doctest::Approx(2.0));
    CHECK(es.values(2) == doctest::Approx(3.0));

    CMatrix bad = m;
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(eig_hermitian(ComplexOperator(b, bad)), NotHermitian);
}

TEST_CASE("free oscillator spectrum")
{
    const double w = 0.7;
    const FockBasis b(30);
    const EigenSystem es = eig_hermitian(build_np_hamiltonian({1e6, w, 0.0, 0.0}, b));
    for (int n = 0; n <= 30; ++n) CHECK(std::abs(es.values(n) - n * w) <= 1e-10 * std::max(1.0, n * w));
}

TEST_CASE("gap of H_np at g1 = g2 = 0.35 g_c")
{
    const AqrmParams p = AqrmParams::scaled(1e6, 1.0, 0.35, 0.35);
    const EigenSystem es = eig_hermitian(build_np_hamiltonian(p, FockBasis(80)));
    CHECK(std::abs(es.values(1) - es.values(0) - 0.71414) < 1e-5);
    CHECK(std::abs(es.values(1) - es.values(0) - np_solution(p).gap) < 1e-6 * np_solution(p).gap);
}

TEST_CASE("eigenvector phase convention is deterministic")
{
    const AqrmParams p = AqrmParams::scaled(1e6, 1.0, 0.6, 0.2);
    const ComplexOperator H = build_np_hamiltonian(p, FockBasis(50));
    const EigenSystem a = eig_hermitian(H), b = eig_hermitian(H);
    CHECK(a.vectors == b.vectors);
    CHECK(a.values == b.values);
}

TEST_CASE("parity of simple states")
{
    const FockBasis b(6);
    CHECK(parity_expectation(fock_state(b, 0)) == 1.0);
    CHECK(parity_expectation(fock_state(b, 1)) == -1.0);
    const FockBasis bs(6, true);
    CHECK(parity_expectation(fock_state(bs, 0, 0)) == doctest::Approx(1.0));
    CHECK(parity_expectation(fock_state(bs, 3, 0)) == doctest::Approx(-1.0));
}

TEST_CASE("overlap deficit resolves tiny differences")
{
    const FockBasis b(40);
    const PureState a(b, build_squeeze_op(b, 0.3).matrix().col(0));
    const PureState c(b, build_squeeze_op(b, 0.3 + 1e-6).matrix().col(0));
    // 1 - |<a|c>| = 1 - cosh(1e-6)^{-1/2} ~ 2.5e-13
    CHECK(overlap_deficit(a, c) == doctest::Approx(0.25e-12).epsilon(1e-3));
}

TEST_CASE("state and operator validation")
{
    CHECK_THROWS_AS(FockBasis(1), RangeError);
    CHECK_THROWS_AS(fock_state(FockBasis(4), 5), RangeError);
    CHECK_THROWS_AS(PureState(FockBasis(4), CVector::Zero(5)), NumericalError);
}
