#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"

using namespace critmet;
using nlohmann::json;

namespace {

struct Sink {
    std::string path;

    void write(const std::vector<OutputRecord>& records) const
    {
        if (path.empty() || path == "-") {
            for (const auto& r : records) r.write(std::cout);
            return;
        }
        std::ofstream os(path);
        if (!os) throw RangeError("cannot open '" + path + "' for writing");
        for (const auto& r : records) r.write(os);
    }
};

json read_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw RangeError("cannot read '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw RangeError("'" + path + "': " + e.what());
    }
}

// Options shared by the commands that take a sweep configuration.
struct ConfigOptions {
    std::string preset = "fig2-k2";
    std::string config;
    std::string engine;
    double delta = 0.0;
    double s_start = -1.0, s_end = -1.0;
    int n_max = 0;

    void attach(CLI::App* app)
    {
        app->add_option("--preset", preset, "named preset")->check(CLI::IsMember(preset_names()));
        app->add_option("--config", config, "JSON sweep configuration (overrides --preset)");
        app->add_option("--engine", engine, "analytic | gaussian | schrodinger | lindblad");
        app->add_option("--delta", delta, "adiabaticity parameter");
        app->add_option("--s-start", s_start, "first value of the swept variable");
        app->add_option("--s-end", s_end, "last value of the swept variable");
        app->add_option("--n-max", n_max, "Fock cutoff");
    }

    SweepConfig resolve() const
    {
        SweepConfig c = config.empty() ? critmet::preset(preset) : SweepConfig::from_json(read_json(config));
        if (!engine.empty()) c.engine = engine_from_string(engine);
        if (delta > 0.0) c.ramp.delta = delta;
        if (s_start >= 0.0) c.s_start = s_start;
        if (s_end >= 0.0) c.s_end = s_end;
        if (n_max > 0) c.n_max = n_max;
        return c;
    }
};

struct Grid {
    double Omega = 1e3, omega = 1.0, lo = -1.5, hi = 1.5;
    int n = 101;

    void attach(CLI::App* app)
    {
        app->add_option("--Omega", Omega, "spin splitting");
        app->add_option("--omega", omega, "field frequency");
        app->add_option("--lo", lo, "lower grid edge in units of g_c");
        app->add_option("--hi", hi, "upper grid edge in units of g_c");
        app->add_option("--n", n, "points per axis")->check(CLI::Range(2, 2001));
    }
};

OutputRecord np_record(const AqrmParams& p)
{
    OutputRecord r{"np", {{"Omega", p.Omega}, {"omega", p.omega}, {"g1", p.g1}, {"g2", p.g2}, {"g_c", p.gc()}},
                   {"key", "value"}, {}};
    const PhaseLabel ph = classify_phase(p);
    r.meta["phase"] = to_string(ph);
    if (ph == PhaseLabel::NP) {
        const NpSolution s = np_solution(p);
        for (auto [k, v] : {std::pair{"gamma", s.gamma}, {"gap", s.gap}, {"E0", s.E0}, {"N", s.N}, {"dx", s.dx},
                            {"dp", s.dp}})
            r.add_row({k, format_number(v)});
    } else if (ph == PhaseLabel::SP_x || ph == PhaseLabel::SP_p) {
        const SpSolution s = sp_solution(p);
        r.meta["branch"] = to_string(s.branch);
        for (auto [k, v] : {std::pair{"alpha_re", s.alpha.real()}, {"alpha_im", s.alpha.imag()},
                            {"gamma_p", s.gamma_p}, {"gap_p", s.gap_p}, {"N", s.mean_n()}})
            r.add_row({k, format_number(v)});
    }
    return r;
}

std::vector<OutputRecord> schedule_records(const SweepConfig& c)
{
    const Schedule sch = build_schedule(c.path, c.ramp, c.start(), c.end(), c.grid);
    OutputRecord r{"schedule",
                   {{"config_hash", c.hash()}, {"config", c.to_json()}, {"certificate", sch.certificate()}},
                   {"t", "s", "g1", "g2", "v", "gap"},
                   {}};
    for (const auto& x : sch.samples()) r.add_row({x.t, x.s, x.g1, x.g2, x.v, x.gap});
    std::vector<OutputRecord> out{std::move(r)};
    try {
        const Prediction p = predict(c.path, c.ramp, c.end());
        OutputRecord pr{"prediction", {{"scaling", to_string(p.scaling)}}, {"key", "value"}, {}};
        pr.add_row({"T_closed", format_number(p.T_closed)});
        pr.add_row({"N_final", format_number(p.N_final)});
        pr.add_row({"F_final", format_number(p.F_final)});
        pr.add_row({"excitation", format_number(p.excitation)});
        for (const auto& [k, v] : p.coefficients) pr.add_row({k, format_number(v)});
        out.push_back(std::move(pr));
    } catch (const UnsupportedCombo&) {
    }
    return out;
}

// Reads columnar text as written by OutputRecord (first record only).
OutputRecord read_record(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw RangeError("cannot read '" + path + "'");
    OutputRecord r{"input", {}, {}, {}};
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!r.columns.empty()) break;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (r.columns.empty())
            r.columns = cells;
        else
            r.add_row(std::move(cells));
    }
    if (r.columns.empty()) throw RangeError("'" + path + "' holds no header");
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Critical quantum metrology with the anisotropic quantum Rabi model"};
    app.require_subcommand(1);
    Sink sink;
    app.add_option("-o,--output", sink.path, "output file (default stdout)");

    Grid pd_grid, qm_grid;
    auto* pd = app.add_subcommand("phase-diagram", "phase, displacement and widths over the (g1, g2) plane");
    pd_grid.attach(pd);
    auto* qm = app.add_subcommand("qfi-map", "analytic and fidelity QFI over NP points of the plane");
    qm_grid.attach(qm);

    double np_Omega = 1e6, np_omega = 1.0, np_g1 = 0.5, np_g2 = 0.0;
    bool np_scaled = false;
    auto* np = app.add_subcommand("np", "ground-state solution at one coupling point");
    np->add_option("--Omega", np_Omega, "spin splitting");
    np->add_option("--omega", np_omega, "field frequency");
    np->add_option("--g1", np_g1, "rotating coupling");
    np->add_option("--g2", np_g2, "counter-rotating coupling");
    np->add_flag("--scaled", np_scaled, "couplings are given in units of g_c");

    ConfigOptions sc_opt, ev_opt, lb_opt;
    auto* sc = app.add_subcommand("schedule", "adiabatic schedule and closed-form predictions");
    sc_opt.attach(sc);
    auto* ev = app.add_subcommand("evolve", "one closed-system run along the schedule");
    ev_opt.attach(ev);
    ev_opt.engine = "gaussian";

    double kp = -1.0, ka = -1.0;
    std::string mode;
    auto* lb = app.add_subcommand("lindblad", "one open-system run along the schedule");
    lb_opt.attach(lb);
    lb_opt.preset = "fig3";
    lb->add_option("--kappa-p", kp, "photon loss rate");
    lb->add_option("--kappa-a", ka, "spin decay rate");
    lb->add_option("--mode", mode, "FullModel | BosonicOnly");

    std::string fit_in, fit_x, fit_y, fit_model = "Exponential";
    double fit_lo = -std::numeric_limits<double>::infinity(), fit_hi = std::numeric_limits<double>::infinity();
    std::optional<double> fit_b;
    auto* ft = app.add_subcommand("fit", "scaling fit over two columns of a record");
    ft->add_option("input", fit_in, "columnar file")->required();
    ft->add_option("--x", fit_x, "abscissa column")->required();
    ft->add_option("--y", fit_y, "ordinate column")->required();
    ft->add_option("--model", fit_model, "Exponential | Power | LogTime | InversePower");
    ft->add_option("--lo", fit_lo, "window lower edge on x");
    ft->add_option("--hi", fit_hi, "window upper edge on x");
    ft->add_option("--fixed-b", fit_b, "hold the exponent fixed");

    std::string figure;
    auto* rp = app.add_subcommand("reproduce", "reproduce a figure and print verdicts");
    rp->add_option("figure_id", figure, "figure")->required()->check(CLI::IsMember(figure_ids()));
    bool rp_records = false;
    rp->add_flag("--records", rp_records, "also emit the data records");

    std::string sweep_file;
    auto* sw = app.add_subcommand("sweep", "run a sweep configuration");
    sw->add_option("config", sweep_file, "JSON configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*pd) {
            sink.write({phase_surface(pd_grid.Omega, pd_grid.omega, pd_grid.lo, pd_grid.hi, pd_grid.n)});
        } else if (*qm) {
            sink.write({qfi_map(qm_grid.Omega, qm_grid.omega, qm_grid.lo, qm_grid.hi, qm_grid.n)});
        } else if (*np) {
            const AqrmParams p = np_scaled ? AqrmParams::scaled(np_Omega, np_omega, np_g1, np_g2)
                                           : AqrmParams{np_Omega, np_omega, np_g1, np_g2};
            p.validate();
            sink.write({np_record(p)});
        } else if (*sc) {
            sink.write(schedule_records(sc_opt.resolve()));
        } else if (*ev) {
            SweepConfig c = ev_opt.resolve();
            if (c.engine == Engine::Lindblad) throw UnsupportedCombo("evolve: use the lindblad command");
            sink.write({evolve_once(c)});
        } else if (*lb) {
            SweepConfig c = lb_opt.resolve();
            c.engine = Engine::Lindblad;
            LindbladConfig d = c.dissipation.value_or(LindbladConfig{});
            if (kp >= 0.0) d.kappa_p = kp;
            if (ka >= 0.0) d.kappa_a = ka;
            if (mode == "FullModel") d.mode = LindbladMode::FullModel;
            else if (mode == "BosonicOnly") d.mode = LindbladMode::BosonicOnly;
            else if (!mode.empty()) throw RangeError("unknown dissipation mode '" + mode + "'");
            c.dissipation = d;
            sink.write({evolve_once(c)});
        } else if (*ft) {
            const OutputRecord in = read_record(fit_in);
            const FitResult f =
                fit_scaling(in.column(fit_x), in.column(fit_y), fit_model_from_string(fit_model), {fit_lo, fit_hi}, fit_b);
            OutputRecord r{"fit", {{"input", fit_in}, {"x", fit_x}, {"y", fit_y}},
                           {"model", "a", "a_err", "b", "b_err", "b_fixed", "window_lo", "window_hi", "rms", "n"}, {}};
            r.add_row({to_string(f.model), format_number(f.a), format_number(f.a_err), format_number(f.b),
                       format_number(f.b_err), f.b_fixed ? "1" : "0", format_number(f.window_lo),
                       format_number(f.window_hi), format_number(f.rms), std::to_string(f.n)});
            sink.write({r});
        } else if (*rp) {
            const Report rep = reproduce(figure);
            rep.write(std::cout);
            if (rp_records || !sink.path.empty()) sink.write(rep.records);
        } else if (*sw) {
            const SweepResult r = run_sweep(SweepConfig::from_json(read_json(sweep_file)));
            sink.write(r.records);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
