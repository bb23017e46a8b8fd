#include <cmath>
#include <sstream>

#include <doctest.h>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"

using namespace critmet;

namespace {

std::vector<double> grid(double lo, double hi, int n, bool log)
{
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        const double u = double(i) / (n - 1);
        x.push_back(log ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u);
    }
    return x;
}

SweepConfig small_config()
{
    SweepConfig c = preset("fig2-k2");
    c.s_end = 0.05;
    return c;
}

std::string dump(const std::vector<OutputRecord>& records)
{
    std::ostringstream os;
    for (const auto& r : records) r.write(os);
    return os.str();
}

}  // namespace

TEST_CASE("fits recover synthetic laws")
{
    const auto xl = grid(1.0, 50.0, 40, false);
    const auto xs = grid(1e-4, 1e-1, 40, true);
    std::vector<double> ye, yp, yt, yi;
    for (double x : xl) ye.push_back(2.0 * std::exp(0.5 * x));
    for (double x : xs) {
        yp.push_back(3.0 * std::pow(x, 1.7));
        yt.push_back(1154.7 * std::log(1.0 / x) + 12.0);
        yi.push_back(4.4e-15 * std::pow(x, -4.0));
    }
    const FitResult e = fit_scaling(xl, ye, FitModel::Exponential);
    CHECK(e.a == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(e.b == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(e.rms < 1e-12);
    CHECK(e(10.0) == doctest::Approx(2.0 * std::exp(5.0)).epsilon(1e-10));

    const FitResult p = fit_scaling(xs, yp, FitModel::Power);
    CHECK(p.a == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(p.b == doctest::Approx(1.7).epsilon(1e-10));

    const FitResult t = fit_scaling(xs, yt, FitModel::LogTime);
    CHECK(t.a == doctest::Approx(1154.7).epsilon(1e-10));
    CHECK(t.b == doctest::Approx(12.0).epsilon(1e-10));

    const FitResult i = fit_scaling(xs, yi, FitModel::InversePower);
    CHECK(i.a == doctest::Approx(4.4e-15).epsilon(1e-10));
    CHECK(i.b == doctest::Approx(4.0).epsilon(1e-10));

    const FitResult f = fit_scaling(xs, yi, FitModel::InversePower, {}, 4.0);
    CHECK(f.b_fixed);
    CHECK(f.a == doctest::Approx(4.4e-15).epsilon(1e-10));
}

TEST_CASE("fit window selects the samples used")
{
    const auto x = grid(1.0, 40.0, 40, false);
    std::vector<double> y;
    for (double v : x) y.push_back(v < 20.0 ? 1.0 : std::exp(0.1 * v));
    const FitResult r = fit_scaling(x, y, FitModel::Exponential, {20.0, 40.0});
    CHECK(r.b == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(r.window_lo >= 20.0);
    CHECK(r.n < 40);
}

TEST_CASE("fit errors")
{
    const auto x = grid(1.0, 2.0, 9, false);
    std::vector<double> y(x.size(), 1.0);
    CHECK_THROWS_AS(fit_scaling(x, y, FitModel::Exponential), InsufficientData);
    auto x2 = grid(1.0, 2.0, 12, false);
    std::vector<double> y2(x2.size(), 1.0);
    y2[3] = -1.0;
    CHECK_THROWS_AS(fit_scaling(x2, y2, FitModel::Exponential), NonPositiveData);
    CHECK_THROWS_AS(fit_scaling(std::vector<double>(12, 1.0), std::vector<double>(12, 1.0), FitModel::Exponential),
                    InsufficientData);
    CHECK_THROWS_AS(fit_scaling(x2, y, FitModel::Exponential), RangeError);
}

TEST_CASE("configuration round-trips through JSON")
{
    for (const auto& name : preset_names()) {
        const SweepConfig c = preset(name);
        const SweepConfig d = SweepConfig::from_json(c.to_json());
        CHECK(d.to_json() == c.to_json());
        CHECK(d.hash() == c.hash());
    }
    SweepConfig a = preset("fig2-k2"), b = a;
    b.ramp.delta = 2e-3;
    CHECK(a.hash() != b.hash());
    CHECK_THROWS_AS(preset("nope"), RangeError);
    CHECK_THROWS_AS(SweepConfig::from_json(nlohmann::json{{"engine", "warp"}}), RangeError);
    CHECK_THROWS_AS(SweepConfig::from_json(nlohmann::json{{"n_max", 1}}), RangeError);
    CHECK_THROWS_AS(SweepConfig::from_json(nlohmann::json{{"engine", "lindblad"}}), RangeError);
}

TEST_CASE("sweeps are deterministic")
{
    const SweepConfig c = small_config();
    const SweepResult a = run_sweep(c);
    const SweepResult b = run_sweep(c);
    CHECK(dump(a.records) == dump(b.records));
    CHECK(a.record("sweep").meta.at("config_hash") == c.hash());
}

TEST_CASE("single run record")
{
    SweepConfig c = small_config();
    const OutputRecord g = evolve_once(c);
    CHECK(g.meta.at("config_hash") == c.hash());
    const auto n = g.column("mean_n");
    const auto f = g.column("fid_gs");
    CHECK(n.size() > 10);
    CHECK(f.back() > 1.0 - 1e-6);

    c.engine = Engine::Schrodinger;
    const OutputRecord s = evolve_once(c);
    const auto ns = s.column("mean_n");
    REQUIRE(ns.size() == n.size());
    CHECK(ns.back() == doctest::Approx(n.back()).epsilon(1e-4));

    c.engine = Engine::Analytic;
    CHECK_THROWS_AS(evolve_once(c), UnsupportedCombo);
}

TEST_CASE("output records")
{
    OutputRecord r{"x", {}, {"a", "b"}, {}};
    r.add_row({1.0, 0.1});
    CHECK_THROWS_AS(r.add_row(std::vector<double>{1.0}), RangeError);
    CHECK_THROWS_AS(r.column("c"), RangeError);
    CHECK(r.column("b")[0] == 0.1);
    CHECK(format_number(std::nan("")) == "nan");
    std::ostringstream os;
    r.write(os);
    CHECK(os.str().rfind("# {", 0) == 0);
}

TEST_CASE("unknown figure")
{
    CHECK_THROWS_AS(reproduce("fig99"), UnknownFigure);
    CHECK(figure_ids().size() >= 6);
}
