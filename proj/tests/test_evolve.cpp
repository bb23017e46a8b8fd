#include <cmath>

#include <doctest.h>

#include "critmet/errors.hpp"
#include "critmet/evolve.hpp"

using namespace critmet;

namespace {

const double kW = 2.5e5, kw = 0.25;
const PathSpec kLine{StraightLine{2.0}, kW, kw};

// Couplings held at path point s for a duration T.
Schedule frozen(const PathSpec& spec, double s, double T, int samples = 11)
{
    const PathPoint pt = path_point(spec, s);
    std::vector<ScheduleSample> smp;
    for (int i = 0; i < samples; ++i) smp.push_back({T * i / (samples - 1), s, pt.g1, pt.g2, 0.0, path_gap(spec, s)});
    RampSpec ramp;
    if (std::holds_alternative<BoundaryLine>(spec.shape)) ramp.law = RampLaw::GapCubic;
    return Schedule(spec, ramp, smp, 0.0);
}

PureState squeezed(const FockBasis& b, double gamma) { return PureState(b, build_squeeze_op(b, gamma).matrix().col(0)); }

}  // namespace

TEST_CASE("ground state is stationary under frozen couplings")
{
    const FockBasis b(40);
    const Schedule sch = frozen(kLine, 0.2, 100.0 / kw);
    const PureState g = squeezed(b, path_gamma(kLine, 0.2));
    const Trajectory tr = schrodinger_evolve(np_model(kLine, b), sch, g);
    for (const auto& o : tr.samples) CHECK(o.fid_gs >= 1.0 - 1e-10);
    CHECK(state_fidelity(*tr.final_state, g) >= 1.0 - 1e-10);
}

TEST_CASE("vacuum covariance is stationary without coupling")
{
    const PathSpec spec{BoundaryLine{-1.0}, kW, kw};
    const Trajectory tr = gaussian_evolve(frozen(spec, 0.0, 50.0));
    CHECK((tr.final_gaussian->cov - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("sudden quench from the vacuum")
{
    // Hold (0.35, 0.35) g_c, reached on the boundary-approach line at s = 0.35.
    const PathSpec spec{BoundaryLine{-1.0}, kW, kw};
    const double gap = path_gap(spec, 0.35);
    const double period = M_PI / gap;
    const Schedule sch = frozen(spec, 0.35, 2.0 * period, 41);
    const FockBasis b(40);
    EvolveOptions o;
    o.keep_states = true;
    const Trajectory ts = schrodinger_evolve(np_model(spec, b), sch, fock_state(b, 0), o);
    const Trajectory tg = gaussian_evolve(sch, GaussianState{}, o);
    double n_max = 0.0;
    for (std::size_t k = 0; k < ts.samples.size(); ++k) {
        CHECK(ts.samples[k].mean_n == doctest::Approx(tg.samples[k].mean_n).epsilon(1e-6));
        n_max = std::max(n_max, tg.samples[k].mean_n);
    }
    CHECK(n_max > 1e-3);
    CHECK(tg.samples[20].mean_n < 1e-12);  // one period
    CHECK(tg.samples[40].mean_n < 1e-12);
    CHECK(n_max <= std::pow(std::sinh(2.0 * path_gamma(spec, 0.35)), 2) + 1e-12);
}

TEST_CASE("Gaussian and Fock engines agree along a sweep")
{
    const Schedule sch = build_schedule(kLine, {}, 0.5, 0.05);
    const FockBasis b(40);
    EvolveOptions o;
    o.keep_states = true;
    const Trajectory ts = schrodinger_evolve(np_model(kLine, b), sch, squeezed(b, path_gamma(kLine, 0.5)), o);
    const Trajectory tg = gaussian_evolve(sch, o);
    REQUIRE(ts.samples.size() == tg.samples.size());
    for (std::size_t k = 0; k < ts.samples.size(); ++k) {
        const auto& a = ts.samples[k];
        const auto& g = tg.samples[k];
        for (auto [x, y] : {std::pair{a.mean_x, g.mean_x}, {a.mean_p, g.mean_p}, {a.var_x, g.var_x},
                            {a.var_p, g.var_p}, {a.cov_xp, g.cov_xp}})
            CHECK(std::abs(x - y) <= 1e-6 + 1e-4 * std::abs(y));
        CHECK(a.parity == doctest::Approx(1.0).epsilon(1e-8));
        // Odd amplitudes vanish by parity.
        if (k % 40 == 0) {
            const auto c = instantaneous_decompose(ts.states[k], path_gamma(kLine, a.s));
            CHECK(std::abs(c[1]) <= 1e-8);
            CHECK(std::abs(c[3]) <= 1e-8);
        }
    }
}

TEST_CASE("Gaussian run stays pure")
{
    const Trajectory tr = gaussian_evolve(build_schedule(kLine, {}, 0.5, 1e-3));
    CHECK(std::sqrt(tr.final_gaussian->purity_det()) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(tr.samples.back().mean_n == doctest::Approx(0.07735).epsilon(0.02));
}

TEST_CASE("adiabatic deficit scales with delta squared")
{
    double d[2];
    int i = 0;
    for (double delta : {1e-4, 1e-5}) {
        const Trajectory tr = gaussian_evolve(build_schedule(kLine, {delta}, 0.5, 1e-3));
        d[i++] = 1.0 - tr.samples.back().fid_gs;
    }
    CHECK(d[0] / d[1] == doctest::Approx(100.0).epsilon(0.30));
}

TEST_CASE("second-order certificate of the unitary stepper")
{
    const Schedule sch = build_schedule(kLine, {0.02}, 0.5, 0.1);
    const FockBasis b(30);
    EvolveOptions o;
    o.certify_order = true;
    const Trajectory tr = schrodinger_evolve(np_model(kLine, b), sch, squeezed(b, path_gamma(kLine, 0.5)), o);
    CHECK(tr.order_ratio >= 3.5);
    const Trajectory tg = gaussian_evolve(sch, o);
    CHECK(tg.order_ratio >= 3.5);
}

TEST_CASE("Fock truncation is enforced")
{
    const PathSpec spec{BoundaryLine{-1.0}, kW, kw};
    const FockBasis b(6);
    CHECK_THROWS_AS(schrodinger_evolve(np_model(spec, b), frozen(spec, 0.49, 200.0), fock_state(b, 0)),
                    TruncationError);
}

TEST_CASE("excitation amplitude scales with delta squared")
{
    double prev = 0.0;
    for (double delta : {1e-4, 1e-5}) {
        const double c = std::norm(excitation_amplitude(build_schedule(kLine, {delta}, 0.5, 1e-3)).records.back().c2);
        if (prev > 0.0) CHECK(prev / c == doctest::Approx(100.0).epsilon(0.30));
        prev = c;
    }
}

TEST_CASE("instantaneous decomposition")
{
    const FockBasis b(40);
    const auto c = instantaneous_decompose(squeezed(b, 0.3), 0.3);
    CHECK(std::abs(c[0]) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t n = 1; n < c.size(); ++n) CHECK(std::abs(c[n]) < 1e-12);
}

TEST_CASE("perturbative amplitude tracks the projected amplitude")
{
    const Schedule sch = build_schedule(kLine, {}, 0.5, 0.02);
    const FockBasis b(40);
    EvolveOptions o;
    o.keep_states = true;
    const Trajectory ts = schrodinger_evolve(np_model(kLine, b), sch, squeezed(b, path_gamma(kLine, 0.5)), o);
    const ExcitationSeries ex = excitation_amplitude(sch);
    const std::size_t mid = ts.states.size() / 2;
    for (std::size_t k : {mid, ts.states.size() - 1}) {
        const double proj = std::abs(instantaneous_decompose(ts.states[k], path_gamma(kLine, ts.samples[k].s))[2]);
        const double pert = std::abs(ex.records[k].c2);
        CHECK(proj / pert > 0.5);
        CHECK(proj / pert < 2.0);
    }
}
