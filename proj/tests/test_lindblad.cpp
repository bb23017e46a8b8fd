#include <cmath>

#include <doctest.h>

#include "critmet/errors.hpp"
#include "critmet/evolve.hpp"

using namespace critmet;

namespace {

const PathSpec kLine{StraightLine{2.0}, 2.5e5, 0.25};

PureState squeezed(const FockBasis& b, double gamma) { return PureState(b, build_squeeze_op(b, gamma).matrix().col(0)); }

}  // namespace

TEST_CASE("closed limit reproduces the unitary engine")
{
    const FockBasis b(30);
    const Schedule sch = build_schedule(kLine, {0.02}, 0.5, 0.1);
    const PureState g = squeezed(b, path_gamma(kLine, 0.5));
    const HamiltonianModel m = np_model(kLine, b);
    const Trajectory u = schrodinger_evolve(m, sch, g);
    const Trajectory l = lindblad_evolve(m, sch, LindbladConfig{}, DensityOperator::from_pure(g));
    CHECK(state_fidelity(*u.final_state, *l.final_rho) >= 1.0 - 1e-6);
    CHECK(l.max_trace_deviation <= 1e-8);
    for (std::size_t k = 0; k < u.samples.size(); k += 10)
        CHECK(l.samples[k].mean_n == doctest::Approx(u.samples[k].mean_n).epsilon(1e-5));
}

TEST_CASE("photon loss of a single excitation")
{
    const FockBasis b(4);
    const LadderOps L = build_ladder_ops(b);
    const double kappa = 0.3, w = 1.0;
    const CMatrix H = w * L.n.matrix();
    const DensityOperator rho0 = DensityOperator::from_pure(fock_state(b, 1));
    for (double t : {0.5, 2.0, 5.0}) {
        const DensityOperator r = lindblad_propagate_static(H, {std::sqrt(kappa) * L.a.matrix()}, rho0, t, 2000);
        CHECK(std::abs(r.rho(1, 1).real() - std::exp(-kappa * t)) <= 1e-6);
        CHECK(std::abs(r.rho(0, 0).real() - (1.0 - std::exp(-kappa * t))) <= 1e-6);
        CHECK(r.trace_deviation() <= 1e-12);
    }
}

TEST_CASE("coherent amplitude decays at half the loss rate")
{
    const FockBasis b(25);
    const LadderOps L = build_ladder_ops(b);
    const double kappa = 0.2, t = 3.0;
    const PureState a0(b, build_displacement_op(b, {1.5, 0.0}).matrix().col(0));
    const DensityOperator r =
        lindblad_propagate_static(CMatrix::Zero(b.dim(), b.dim()), {std::sqrt(kappa) * L.a.matrix()},
                                  DensityOperator::from_pure(a0), t, 3000);
    CHECK(std::abs(expectation(L.a, r) - 1.5 * std::exp(-0.5 * kappa * t)) <= 1e-6);
}

TEST_CASE("dissipative evolution contracts trace distance")
{
    const FockBasis b(20);
    const LadderOps L = build_ladder_ops(b);
    const CMatrix H = 0.7 * L.n.matrix() + 0.2 * (L.a.matrix() * L.a.matrix() + L.adag.matrix() * L.adag.matrix());
    const std::vector<CMatrix> c{std::sqrt(0.1) * L.a.matrix()};
    DensityOperator x = DensityOperator::from_pure(fock_state(b, 0));
    DensityOperator y = DensityOperator::from_pure(fock_state(b, 2));
    double prev = trace_distance(x, y);
    for (int k = 0; k < 8; ++k) {
        x = lindblad_propagate_static(H, c, x, 0.5, 200);
        y = lindblad_propagate_static(H, c, y, 0.5, 200);
        const double d = trace_distance(x, y);
        CHECK(d <= prev + 1e-10);
        prev = d;
        CHECK(x.min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("swept run keeps a physical state")
{
    const FockBasis b(30);
    const Schedule sch = build_schedule(kLine, {0.02}, 0.5, 0.1);
    const PureState g = squeezed(b, path_gamma(kLine, 0.5));
    EvolveOptions o;
    o.certify_order = true;
    const Trajectory l =
        lindblad_evolve(np_model(kLine, b), sch, LindbladConfig{0.01 * 0.25}, DensityOperator::from_pure(g), o);
    CHECK(l.max_trace_deviation <= 1e-8);
    CHECK(l.min_eigenvalue >= -1e-10);
    CHECK(l.order_ratio >= 12.0);
    CHECK((l.final_rho->rho * l.final_rho->rho).trace().real() < 1.0 - 1e-6);
    CHECK(l.samples.back().mean_n > 0.0);
}

TEST_CASE("invalid dissipation settings")
{
    const FockBasis b(10);
    const Schedule sch = build_schedule(kLine, {0.02}, 0.5, 0.4);
    const DensityOperator rho = DensityOperator::from_pure(fock_state(b, 0));
    CHECK_THROWS_AS(lindblad_evolve(np_model(kLine, b), sch, LindbladConfig{-0.1}, rho), RangeError);
    // The full model needs the spin factor.
    LindbladConfig full{0.0, 0.01, LindbladMode::FullModel};
    CHECK_THROWS_AS(lindblad_evolve(np_model(kLine, b), sch, full, rho), UnsupportedCombo);

    const FockBasis bs(10, true);
    const DensityOperator rs = DensityOperator::from_pure(fock_state(bs, 0));
    const PathSpec big{StraightLine{2.0}, 2.5e5, 0.25};
    CHECK_THROWS_AS(lindblad_evolve(full_aqrm_model(big.Omega, big.omega, bs), build_schedule(big, {0.02}, 0.5, 0.4),
                                    full, rs),
                    UnsupportedCombo);
}

TEST_CASE("spin decay is ignored without the spin factor")
{
    const FockBasis b(20);
    const Schedule sch = build_schedule(kLine, {0.05}, 0.5, 0.3);
    const Trajectory l = lindblad_evolve(np_model(kLine, b), sch, LindbladConfig{0.0, 0.1},
                                         DensityOperator::from_pure(squeezed(b, path_gamma(kLine, 0.5))));
    CHECK(l.kappa_a_ignored);
}
