// Acceptance run: one PASS/FAIL line per criterion, sub-checks indented below.
// Exit status is 1 when any criterion fails.
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"
#include "critmet/evolve.hpp"
#include "critmet/qfi.hpp"

using namespace critmet;

namespace {

struct Check {
    std::string what;
    VerdictStatus status;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;  // 0: no runtime bound
    std::function<std::vector<Check>()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Check bound(const std::string& what, double value, double limit, const char* unit = "")
{
    const bool ok = std::isfinite(value) && value <= limit;
    return {what, ok ? VerdictStatus::Pass : VerdictStatus::Fail,
            fmt("%.4g <= %.4g", value, limit) + unit};
}

Check rel(const std::string& what, double value, double ref, double tol)
{
    const double r = std::abs(value / ref - 1.0);
    return {what, std::isfinite(r) && r <= tol ? VerdictStatus::Pass : VerdictStatus::Fail,
            fmt("%.6g vs %.6g, off %.3g", value, ref, r) + fmt(" (tol %.3g)", tol)};
}

Check note(const std::string& what, const std::string& detail) { return {what, VerdictStatus::Info, detail}; }

void from_report(std::vector<Check>& out, const Report& rep, const std::string& filter = "")
{
    for (const Verdict& v : rep.verdicts) {
        if (!filter.empty() && v.item.find(filter) == std::string::npos) continue;
        std::string d = fmt("%.6g vs %.6g", v.computed, v.reference);
        if (v.status == VerdictStatus::Pass || v.status == VerdictStatus::Fail) d += fmt(" (tol %.3g)", v.tolerance);
        if (!v.note.empty()) d += "; " + v.note;
        out.push_back({v.preset + ": " + v.item, v.status, d});
    }
}

// Points strictly inside the normal phase: |g1| + |g2| <= 0.98 g_c, laid out
// on a 20 x 20 grid in the rotated coordinates g1 +- g2.
std::vector<AqrmParams> np_grid(double Omega, double omega)
{
    std::vector<AqrmParams> pts;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double u = -0.98 + 1.96 * i / 19.0, w = -0.98 + 1.96 * j / 19.0;
            pts.push_back(AqrmParams::scaled(Omega, omega, 0.5 * (u + w), 0.5 * (u - w)));
        }
    return pts;
}

PureState squeezed(const FockBasis& b, double gamma) { return PureState(b, build_squeeze_op(b, gamma).matrix().col(0)); }

std::vector<Check> np_oracle()
{
    const FockBasis b(150);
    double worst_overlap = 0.0, worst_gap = 0.0;
    int n = 0;
    for (const AqrmParams& p : np_grid(1e6, 1.0)) {
        const NpSolution s = np_solution(p);
        const EigenSystem es = eig_hermitian(build_np_hamiltonian(p, b));
        worst_overlap = std::max(worst_overlap, 1.0 - state_fidelity(squeezed(b, s.gamma), es.state(0)));
        worst_gap = std::max(worst_gap, std::abs(es.values(1) - es.values(0) - s.gap) / s.gap);
        ++n;
    }
    return {note("grid", fmt("%.0f NP points, n_max 150", n)),
            bound("worst 1 - |<Gamma 0|ground>|^2", worst_overlap, 1e-8),
            bound("worst relative gap error", worst_gap, 1e-6)};
}

std::vector<Check> qfi_concordance()
{
    const double w = 1.0;
    const FockBasis b(150);
    double worst_p = 0.0, worst_f = 0.0;
    for (const AqrmParams& p : np_grid(1e6, w)) {
        const double Fa = qfi_np_analytic(p).value;
        const double e = 1e-6 * w;
        const ComplexOperator H1(b, (build_np_hamiltonian(p.with_omega(w + e), b).matrix() -
                                     build_np_hamiltonian(p.with_omega(w - e), b).matrix()) /
                                        (2.0 * e));
        const double Fp = qfi_perturbative(build_np_hamiltonian(p, b), H1).value;
        std::function<PureState(double)> ground = [&](double x) {
            return eig_hermitian_fast(build_np_hamiltonian(p.with_omega(x), b).matrix(), b).state(0);
        };
        const double Ff = qfi_fidelity(ground, w, 1e-3 * w).value;
        // Relative to F + 1e-6: points on the axes carry F = 0.
        worst_p = std::max(worst_p, std::abs(Fp - Fa) / (Fa + 1e-6));
        worst_f = std::max(worst_f, std::abs(Ff - Fa) / (Fa + 1e-6));
    }
    return {bound("worst |F_pert / F_analytic - 1|", worst_p, 1e-3),
            bound("worst |F_fidelity / F_analytic - 1|", worst_f, 1e-3)};
}

std::vector<Check> figure(const std::string& id, const std::string& filter = "")
{
    std::vector<Check> out;
    from_report(out, reproduce(id), filter);
    return out;
}

std::vector<Check> excitation()
{
    std::vector<Check> out;
    const SweepConfig c = preset("fig2-k2");
    const PathSpec& spec = c.path;
    const Schedule sch = build_schedule(spec, c.ramp, c.start(), c.end(), c.grid);
    const FockBasis b(80);
    EvolveOptions o;
    o.keep_states = true;
    const Trajectory tr = schrodinger_evolve(np_model(spec, b), sch, squeezed(b, path_gamma(spec, c.start())), o);
    const ExcitationSeries ex = excitation_amplitude(sch);

    const double target = std::pow(c.ramp.delta, 2) / (32.0 * 4.0);
    const double pop = 1.0 - tr.samples.back().fid_gs;
    out.push_back({"final excited population within a factor 3 of delta^2/(32 k^2)",
                   pop <= 3.0 * target && pop >= target / 3.0 ? VerdictStatus::Pass : VerdictStatus::Fail,
                   fmt("%.4g vs %.4g, ratio %.3g", pop, target, pop / target)});

    double lo = 1e300, hi = 0.0;
    for (std::size_t k = 1; k < tr.states.size(); ++k) {
        const double proj = std::abs(instantaneous_decompose(tr.states[k], path_gamma(spec, tr.samples[k].s))[2]);
        const double pert = std::abs(ex.records[k].c2);
        lo = std::min(lo, proj / pert);
        hi = std::max(hi, proj / pert);
    }
    out.push_back({"projected |c2| / perturbative |c2| within a factor 2 along the run",
                   lo >= 0.5 && hi <= 2.0 ? VerdictStatus::Pass : VerdictStatus::Fail,
                   fmt("range [%.4g, %.4g] over %.0f samples", lo, hi, double(tr.states.size() - 1))});

    // Where the excitation comes from: the ramp switches on at full speed.
    auto local = [&](std::size_t i) {
        const auto& S = sch.samples();
        const double gd = (path_gamma(spec, S[i + 1].s) - path_gamma(spec, S[i].s)) / (S[i + 1].t - S[i].t);
        const double gap = path_gap(spec, 0.5 * (S[i].s + S[i + 1].s));
        return std::pow(gd / (2.0 * std::sqrt(2.0) * gap), 2);
    };
    out.push_back(note("local adiabatic |c2|^2 at the endpoint", fmt("%.4g", local(sch.samples().size() - 2))));
    out.push_back(note("local adiabatic |c2|^2 at the start", fmt("%.4g", local(0))));
    return out;
}

std::vector<Check> heisenberg()
{
    const SweepResult r = run_sweep(preset("heisenberg-k2"));
    const double d = r.config.ramp.delta, k = 2.0;
    return {rel("fitted F ~ T^p exponent", r.fit("F_analytic~T|power").b, 2.0, 0.05),
            rel("prefactor at p = 2", r.fit("F_analytic~T|b=2").a, 8.0 * d * d / (k * k), 0.15),
            note("evolved-state exponent", fmt("%.6g", r.fit("F_fidelity~T|power").b))};
}

std::vector<Check> sub_heisenberg()
{
    const SweepResult r = run_sweep(preset("powercurve-b2/3"));
    std::vector<Check> out{rel("beta = 2/3 fitted F ~ T^p exponent", r.fit("F_analytic~T|power").b, 1.0, 0.10)};
    from_report(out, reproduce("tableI"), "beta=0.5 F");
    return out;
}

std::vector<Check> lindblad()
{
    std::vector<Check> out;
    {
        const PathSpec spec{StraightLine{2.0}, 2.5e5, 0.25};
        const FockBasis b(30);
        const Schedule sch = build_schedule(spec, {0.02}, 0.5, 0.1);
        const PureState g = squeezed(b, path_gamma(spec, 0.5));
        const HamiltonianModel m = np_model(spec, b);
        const Trajectory u = schrodinger_evolve(m, sch, g);
        const Trajectory l = lindblad_evolve(m, sch, LindbladConfig{}, DensityOperator::from_pure(g));
        out.push_back(bound("kappa = 0: 1 - fidelity with the unitary run", 1.0 - state_fidelity(*u.final_state, *l.final_rho),
                            1e-6));
        out.push_back(bound("kappa = 0: trace deviation", l.max_trace_deviation, 1e-8));
    }
    {
        const FockBasis b(4);
        const LadderOps L = build_ladder_ops(b);
        const double kappa = 0.3;
        double worst = 0.0;
        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            const DensityOperator r = lindblad_propagate_static(L.n.matrix(), {std::sqrt(kappa) * L.a.matrix()},
                                                                DensityOperator::from_pure(fock_state(b, 1)), t, 2000);
            worst = std::max(worst, std::abs(expectation(L.n, r).real() - std::exp(-kappa * t)));
        }
        out.push_back(bound("single-mode decay |<n> - exp(-kappa t)|", worst, 1e-6));
    }
    from_report(out, reproduce("fig3"));
    return out;
}

std::vector<Check> surfaces()
{
    std::vector<Check> out;
    from_report(out, reproduce("figS2"));
    from_report(out, reproduce("figS3"));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    app.add_option("criteria", only, "criterion numbers to run (default all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "NP ground-state oracle", 60, np_oracle},
        {2, "QFI estimator concordance", 120, qfi_concordance},
        {3, "super-HS sweep, k = 2 and k = 1.5", 120, [] { return figure("fig2"); }},
        {4, "excitation suppression, full Fock run", 600, excitation},
        {5, "Heisenberg slower ramp", 0, heisenberg},
        {6, "sub-HS power curves", 0, sub_heisenberg},
        {7, "boundary approach eta = -1, -3", 0, [] { return figure("figS4"); }},
        {8, "JCM with a squeezed mode", 0, [] { return figure("figS6"); }},
        {9, "Lindblad properties and dissipative SNR", 900, lindblad},
        {10, "phase-diagram surfaces", 60, surfaces},
    };

    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Check> checks;
        try {
            checks = c.run();
        } catch (const std::exception& e) {
            checks.push_back({"run", VerdictStatus::Fail, std::string("threw: ") + e.what()});
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0) checks.push_back(bound("runtime", secs, c.budget_s, " s"));
        bool ok = true;
        for (const Check& k : checks) ok = ok && k.status != VerdictStatus::Fail;
        failed += !ok;
        std::printf("%s  %2d  %s  (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs);
        for (const Check& k : checks) {
            std::string tag = to_string(k.status);
            for (char& ch : tag) ch = char(std::tolower(ch));
            std::printf("          [%s] %s: %s\n", tag.c_str(), k.what.c_str(), k.detail.c_str());
        }
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
