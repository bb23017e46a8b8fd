#include <cmath>

#include <doctest.h>

#include "critmet/errors.hpp"
#include "critmet/qfi.hpp"

using namespace critmet;

namespace {

ComplexOperator domega_np(const AqrmParams& p, const FockBasis& b)
{
    const double e = 1e-6 * p.omega;
    const CMatrix d = (build_np_hamiltonian(p.with_omega(p.omega + e), b).matrix() -
                       build_np_hamiltonian(p.with_omega(p.omega - e), b).matrix()) /
                      (2.0 * e);
    return ComplexOperator(b, d);
}

PureState np_ground(const AqrmParams& p, const FockBasis& b)
{
    return PureState(b, build_squeeze_op(b, np_solution(p).gamma).matrix().col(0));
}

}  // namespace

TEST_CASE("analytic QFI values")
{
    CHECK(qfi_np_analytic(AqrmParams::scaled(2.5e5, 0.25, 0.6, 0.0)).value == 0.0);
    const AqrmParams p = AqrmParams::scaled(2.5e5, 0.25, 0.998, 0.001);
    CHECK(qfi_np_analytic(p).value == doctest::Approx(222221.8).epsilon(1e-6));
    CHECK(qfi_np_analytic(p).value == doctest::Approx(2.0 * std::pow(np_gamma_domega(p), 2)).epsilon(1e-10));
    CHECK_THROWS_AS(qfi_np_analytic(AqrmParams::scaled(2.5e5, 0.25, 0.8, 0.6)), PhaseError);
}

TEST_CASE("square-root path keeps the QFI finite")
{
    const double w = 0.25, k = 2.0, s = 1e-10;
    const AqrmParams p = AqrmParams::scaled(2.5e5, w, 1.0 - k * std::sqrt(s), s);
    CHECK(qfi_np_analytic(p).value == doctest::Approx(1.0 / (8.0 * w * w * std::pow(k, 4))).epsilon(1e-3));
}

TEST_CASE("QFI grows monotonically toward the triple point")
{
    const double k = 2.0;
    double prev = 0.0;
    for (double s = 0.49; s > 1e-6; s *= 0.7) {
        const double F = qfi_np_analytic(AqrmParams::scaled(2.5e5, 0.25, 1.0 - k * s, s)).value;
        CHECK(F > prev);
        prev = F;
    }
}

TEST_CASE("perturbative QFI on toy problems")
{
    const FockBasis b(2);
    CMatrix H0 = CMatrix::Zero(3, 3);
    H0.diagonal() << -0.5, 0.5, 10.0;
    CMatrix diag = CMatrix::Zero(3, 3);
    diag.diagonal() << 1.0, 2.0, 3.0;
    CHECK(qfi_perturbative(ComplexOperator(b, H0), ComplexOperator(b, diag)).value == 0.0);

    CMatrix sx = CMatrix::Zero(3, 3);
    sx(0, 1) = sx(1, 0) = 0.5;
    CHECK(qfi_perturbative(ComplexOperator(b, H0), ComplexOperator(b, sx)).value == doctest::Approx(1.0));

    CMatrix deg = H0;
    deg(1, 1) = -0.5;
    CHECK_THROWS_AS(qfi_perturbative(ComplexOperator(b, deg), ComplexOperator(b, sx)), DegenerateGround);
}

TEST_CASE("fidelity QFI of a parameter-free state")
{
    const FockBasis b(6);
    auto same = [&](double) { return fock_state(b, 2); };
    CHECK(qfi_fidelity(std::function<PureState(double)>(same), 1.0, 1e-3).value == 0.0);
}

TEST_CASE("estimator concordance over the normal phase")
{
    const double w = 1.0, W = 1e6;
    const FockBasis b(120);
    int checked = 0;
    for (double a = -0.85; a <= 0.86; a += 0.17)
        for (double c = -0.85; c <= 0.86; c += 0.17) {
            if (std::abs(a) + std::abs(c) >= 0.99) continue;
            const AqrmParams p = AqrmParams::scaled(W, w, a, c);
            if (np_solution(p).gap < 0.02 * w) continue;
            const double Fa = qfi_np_analytic(p).value;
            const double Fp = qfi_perturbative(build_np_hamiltonian(p, b), domega_np(p, b)).value;
            std::function<PureState(double)> psi = [&](double x) { return np_ground(p.with_omega(x), b); };
            const double Ff = qfi_fidelity(psi, w, 1e-3 * w).value;
            const double ref = std::max(Fa, 1e-12);
            CHECK(std::abs(Fp - Fa) <= 1e-3 * ref + 1e-9);
            CHECK(std::abs(Ff - Fa) <= 1e-3 * ref + 1e-9);
            ++checked;
        }
    CHECK(checked > 40);
}

TEST_CASE("fidelity QFI matches the analytic value near the triple point")
{
    const AqrmParams p = AqrmParams::scaled(2.5e5, 0.25, 0.998, 0.001);
    const FockBasis b(60);
    std::function<PureState(double)> psi = [&](double x) { return np_ground(p.with_omega(x), b); };
    const QfiEstimate q = qfi_fidelity(psi, 0.25, 1e-5 * 0.25);
    CHECK(q.value == doctest::Approx(qfi_np_analytic(p).value).epsilon(1e-4));
    CHECK(q.method == QfiMethod::Fidelity);
}

TEST_CASE("JCM QFI")
{
    const double wt = 0.25, Wt = 2.5e5, k = 3.0;
    const double gc = JcmParams{Wt, wt, 0.0, 0.0}.gc();
    auto on_line = [&](double r, double beta) {
        return JcmParams{Wt, wt, gc * std::sqrt(1.0 - k * std::pow(r, beta)), r * wt};
    };
    CHECK(qfi_jcm_analytic({Wt, wt, 0.5 * gc, 0.0}).value == 0.0);
    // 1 / (2 w^2 (k^2 - 1)^2) (h/w)^-2 at h = 1e-3 w
    CHECK(qfi_jcm_analytic(on_line(1e-3, 1.0)).value == doctest::Approx(125000.0).epsilon(5e-3));
    CHECK(qfi_jcm_analytic(on_line(1e-12, 0.5)).value ==
          doctest::Approx(1.0 / (2.0 * wt * wt * std::pow(k, 4))).epsilon(1e-4));

    const JcmParams p = on_line(0.01, 1.0);
    const FockBasis b(60);
    std::function<PureState(double)> psi = [&](double x) {
        return PureState(b, build_squeeze_op(b, jcm_np_solution(p.with_omega(x)).gamma).matrix().col(0));
    };
    CHECK(qfi_fidelity(psi, wt, 1e-5 * wt).value == doctest::Approx(qfi_jcm_analytic(p).value).epsilon(1e-4));
}

TEST_CASE("photon-number SNR saturates the QFI for normal-phase ground states")
{
    const AqrmParams p = AqrmParams::scaled(2.5e5, 0.25, 0.998, 0.001);
    const FockBasis b(60);
    const double dw = 1e-6;
    const SnrEstimate s = snr_photon_number(np_ground(p, b), np_ground(p.with_omega(0.25 - dw / 2), b),
                                            np_ground(p.with_omega(0.25 + dw / 2), b), dw);
    CHECK(s.value == doctest::Approx(qfi_np_analytic(p).value).epsilon(1e-3));

    const FockBasis v(4);
    CHECK_THROWS_AS(snr_photon_number(fock_state(v, 0), fock_state(v, 0), fock_state(v, 0), dw), ZeroVariance);
}

TEST_CASE("squeezed vacuum deficit")
{
    CHECK(squeezed_vacuum_deficit(0.3, 0.3) == 0.0);
    const double d = 0.2;
    CHECK(squeezed_vacuum_deficit(0.1, 0.1 + d) == doctest::Approx(1.0 - 1.0 / std::sqrt(std::cosh(d))).epsilon(1e-12));
}
