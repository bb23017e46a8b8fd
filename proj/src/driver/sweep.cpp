#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"
#include "critmet/qfi.hpp"

namespace critmet {

void parallel_for(int n, const std::function<void(int)>& f, int workers)
{
    if (workers <= 0) workers = int(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::mutex mu;
    int next = 0;
    std::exception_ptr err;
    auto work = [&] {
        for (;;) {
            int i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= n || err) return;
                i = next++;
            }
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double fit_distance(const PathSpec& spec, double s)
{
    if (const auto* b = std::get_if<BoundaryLine>(&spec.shape)) return 1.0 - (1.0 - 1.0 / b->eta) * s;
    return s;
}

const OutputRecord& SweepResult::record(const std::string& name) const
{
    for (const auto& r : records)
        if (r.name == name) return r;
    throw RangeError("sweep result has no record '" + name + "'");
}

const FitResult& SweepResult::fit(const std::string& target) const
{
    for (const auto& f : fits)
        if (f.target == target) return f.fit;
    throw RangeError("sweep result has no fit '" + target + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Detuned copies of one run at omega -+ h/2 for a ladder h_l = h0 2^{-l}.
struct LevelData {
    std::vector<double> deficit;  // per sample
    std::vector<double> n_minus;
    std::vector<double> n_plus;
};

class Ladder {
public:
    Ladder(double h0, int levels, std::function<LevelData(double)> run)
        : h0_(h0), levels_(levels), run_(std::move(run)), cache_(levels)
    {
    }

    double h(int l) const { return std::ldexp(h0_, -l); }
    int levels() const { return levels_; }

    const LevelData& at(int l)
    {
        if (!cache_[l]) cache_[l] = run_(h(l));
        return *cache_[l];
    }

    int level_of(double step) const { return int(std::lround(std::log2(h0_ / step))); }

private:
    double h0_;
    int levels_;
    std::function<LevelData(double)> run_;
    std::vector<std::optional<LevelData>> cache_;
};

struct DynamicQfi {
    double F = kNaN;
    int level = -1;
};

// Richardson-checked fidelity QFI at sample k, starting at the coarsest level
// whose deficit is in the perturbative regime.
DynamicQfi dynamic_qfi(Ladder& ladder, int k, double omega)
{
    int l0 = 0;
    while (l0 < ladder.levels() && ladder.at(l0).deficit[k] > 1e-3) ++l0;
    if (l0 >= ladder.levels() - 1) return {};
    auto deficit = [&](double a, double b) {
        const int l = ladder.level_of(b - a);
        if (l < 0 || l >= ladder.levels()) throw NoConvergence("ladder exhausted");
        return ladder.at(l).deficit[k];
    };
    try {
        const QfiEstimate q = qfi_fidelity(deficit, omega, ladder.h(l0), ladder.h(ladder.levels() - 1));
        return {q.value, ladder.level_of(q.step_used)};
    } catch (const NoConvergence&) {
        return {};
    }
}

double gaussian_deficit(const GaussianState& a, const GaussianState& b)
{
    const double f = a.fidelity(b);
    return -std::expm1(0.5 * std::log(f));
}

// Last sample index up to which both detuned Hamiltonians stay gapped; coarse
// detunings shift g_c past endpoints close to the critical point.
int gapped_prefix(const Schedule& sch, double omega, double h)
{
    const auto& smp = sch.samples();
    int last = -1;
    for (std::size_t k = 0; k < smp.size(); ++k) {
        bool ok = true;
        for (double sgn : {-0.5, 0.5}) {
            const QuadraticForm q = quadratic_at(sch.spec().with_omega(omega + sgn * h), {smp[k].s, smp[k].g1, smp[k].g2});
            ok = ok && 0.5 * q.A + q.C > 0.0 && 0.5 * q.A - q.C > 0.0;
        }
        if (!ok) break;
        last = int(k);
    }
    return last;
}

// Runs `pair(prefix_schedule)` on the longest gapped prefix, backing off one
// sample if a step midpoint still closes the gap.
template <class Pair>
LevelData detuned_level(const Schedule& sch, double omega, double h, Pair&& pair)
{
    const int K = int(sch.samples().size());
    LevelData d;
    d.deficit.assign(K, std::numeric_limits<double>::infinity());
    d.n_minus.assign(K, kNaN);
    d.n_plus.assign(K, kNaN);
    for (int last = gapped_prefix(sch, omega, h); last >= 1; --last) {
        const Schedule prefix(sch.spec(), sch.ramp(),
                              std::vector<ScheduleSample>(sch.samples().begin(), sch.samples().begin() + last + 1),
                              sch.certificate());
        try {
            pair(prefix, d);
            return d;
        } catch (const GapClosed&) {
        }
    }
    return d;
}

LevelData gaussian_level(const Schedule& sch, double omega, double h)
{
    return detuned_level(sch, omega, h, [&](const Schedule& prefix, LevelData& d) {
        std::vector<Trajectory> runs(2);
        parallel_for(2, [&](int i) {
            EvolveOptions o;
            o.keep_states = true;
            o.instantaneous_observables = false;
            o.hamiltonian_omega = omega + (i == 0 ? -0.5 : 0.5) * h;
            runs[i] = gaussian_evolve(prefix, o);
        });
        for (std::size_t k = 0; k < runs[0].gaussians.size(); ++k) {
            d.deficit[k] = gaussian_deficit(runs[0].gaussians[k], runs[1].gaussians[k]);
            d.n_minus[k] = runs[0].samples[k].mean_n;
            d.n_plus[k] = runs[1].samples[k].mean_n;
        }
    });
}

PureState np_ground_at_start(const PathSpec& hspec, const Schedule& sch, const FockBasis& basis)
{
    const auto& x = sch.samples().front();
    const double g = quadratic_at(hspec, {x.s, x.g1, x.g2}).gamma();
    return PureState(basis, build_squeeze_op(basis, g).matrix().col(0));
}

LevelData schrodinger_level(const Schedule& sch, double omega, double h, int n_max)
{
    const FockBasis basis(n_max);
    return detuned_level(sch, omega, h, [&](const Schedule& prefix, LevelData& d) {
        std::vector<Trajectory> runs(2);
        parallel_for(2, [&](int i) {
            const PathSpec hs = sch.spec().with_omega(omega + (i == 0 ? -0.5 : 0.5) * h);
            EvolveOptions o;
            o.keep_states = true;
            o.instantaneous_observables = false;
            runs[i] = schrodinger_evolve(np_model(hs, basis), prefix, np_ground_at_start(hs, prefix, basis), o);
        });
        for (std::size_t k = 0; k < runs[0].states.size(); ++k) {
            d.deficit[k] = overlap_deficit(runs[0].states[k], runs[1].states[k]);
            d.n_minus[k] = runs[0].samples[k].mean_n;
            d.n_plus[k] = runs[1].samples[k].mean_n;
        }
    });
}

DensityOperator lindblad_initial(const HamiltonianModel& model, const Schedule& sch)
{
    const auto& x = sch.samples().front();
    const EigenSystem es = eig_hermitian_fast(model.build({x.s, x.g1, x.g2}), model.basis);
    return DensityOperator::from_pure(es.state(0));
}

HamiltonianModel lindblad_model(const SweepConfig& c, double omega)
{
    if (c.dissipation->mode == LindbladMode::FullModel)
        return full_aqrm_model(c.path.Omega, omega, FockBasis(c.n_max, true));
    return np_model(c.path.with_omega(omega), FockBasis(c.n_max));
}

void add_fit(SweepResult& res, const std::string& target, const std::vector<double>& x, const std::vector<double>& y,
             FitModel model, const FitWindow& w, std::optional<double> fixed = std::nullopt)
{
    try {
        res.fits.push_back({target, fit_scaling(x, y, model, w, fixed)});
    } catch (const InsufficientData&) {
    } catch (const NonPositiveData&) {
    }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    SweepResult res;
    res.config = cfg;
    const PathSpec& spec = cfg.path;
    const double omega = spec.omega;
    const Schedule sch = build_schedule(spec, cfg.ramp, cfg.start(), cfg.end(), cfg.grid);
    const auto& smp = sch.samples();
    const int K = int(smp.size());
    if (K < 2) throw RangeError("sweep: schedule is empty");
    res.total_time = sch.total_time();
    try {
        res.prediction = predict(spec, cfg.ramp, cfg.end());
    } catch (const UnsupportedCombo&) {
    }

    std::vector<double> s(K), ctrl(K), T(K), F_an(K), F_fid(K, kNaN), c2(K, kNaN), N(K, kNaN), S(K, kNaN);
    std::vector<double> S_rho, N_rho, fid_rho;
    const bool control_g1 = spec.control() == "g1";
    for (int k = 0; k < K; ++k) {
        s[k] = smp[k].s;
        ctrl[k] = control_g1 ? smp[k].g1 : smp[k].g2;
        T[k] = smp[k].t;
        F_an[k] = path_qfi(spec, s[k]);
    }

    std::optional<Trajectory> traj;
    std::optional<Ladder> ladder;
    switch (cfg.engine) {
    case Engine::Analytic: {
        const ExcitationSeries ex = excitation_amplitude(sch);
        for (int k = 0; k < K; ++k) {
            N[k] = path_mean_n(spec, s[k]);
            c2[k] = std::norm(ex.records[k].c2);
            const PathPoint pt{smp[k].s, smp[k].g1, smp[k].g2};
            auto deficit = [&](double a, double b) {
                return squeezed_vacuum_deficit(quadratic_at(spec.with_omega(a), pt).gamma(),
                                               quadratic_at(spec.with_omega(b), pt).gamma());
            };
            if (F_an[k] == 0.0) {
                F_fid[k] = 0.0;
                continue;
            }
            try {
                F_fid[k] = qfi_fidelity(deficit, omega, std::sqrt(8e-6 / F_an[k])).value;
            } catch (const NoConvergence&) {
                ++res.flagged_samples;
            }
        }
        break;
    }
    case Engine::Gaussian:
        traj = gaussian_evolve(sch);
        ladder.emplace(0.05 * omega, 24, [&](double h) { return gaussian_level(sch, omega, h); });
        break;
    case Engine::Schrodinger: {
        const FockBasis basis(cfg.n_max);
        traj = schrodinger_evolve(np_model(spec, basis), sch, np_ground_at_start(spec, sch, basis));
        ladder.emplace(0.05 * omega, 12, [&](double h) { return schrodinger_level(sch, omega, h, cfg.n_max); });
        break;
    }
    case Engine::Lindblad: {
        // Unitary reference from the exact Gaussian engine of the effective model.
        traj = gaussian_evolve(sch);
        ladder.emplace(0.05 * omega, 24, [&](double h) { return gaussian_level(sch, omega, h); });
        const double h = 1e-5 * omega;
        std::vector<Trajectory> runs(2);
        parallel_for(2, [&](int i) {
            const HamiltonianModel m = lindblad_model(cfg, omega + (i == 0 ? -0.5 : 0.5) * h);
            runs[i] = lindblad_evolve(m, sch, *cfg.dissipation, lindblad_initial(m, sch));
        });
        S_rho.resize(K);
        N_rho.resize(K);
        fid_rho.resize(K);
        for (int k = 0; k < K; ++k) {
            const auto& a = runs[0].samples[k];
            const auto& b = runs[1].samples[k];
            N_rho[k] = 0.5 * (a.mean_n + b.mean_n);
            fid_rho[k] = 0.5 * (a.fid_gs + b.fid_gs);
            const double var = 0.5 * (a.var_n + b.var_n);
            S_rho[k] = var < 1e-14 ? kNaN : std::pow((b.mean_n - a.mean_n) / h, 2) / var;
        }
        res.records.push_back({"lindblad_diagnostics",
                               {{"max_trace_deviation", std::max(runs[0].max_trace_deviation, runs[1].max_trace_deviation)},
                                {"max_hermiticity_error",
                                 std::max(runs[0].max_hermiticity_error, runs[1].max_hermiticity_error)},
                                {"min_eigenvalue", std::min(runs[0].min_eigenvalue, runs[1].min_eigenvalue)},
                                {"positivity_retries", runs[0].positivity_retries + runs[1].positivity_retries},
                                {"steps", runs[0].steps},
                                {"kappa_a_ignored", runs[0].kappa_a_ignored},
                                {"domega", h}},
                               {},
                               {}});
        if (cfg.outputs.trajectory) {
            OutputRecord tr{"trajectory", {{"note", "average of the omega -+ domega/2 runs"}},
                            {"t", "g1", "g2", "mean_n", "var_n", "fid_gs", "c2_sq", "parity"}, {}};
            for (int k = 0; k < K; ++k) {
                const auto& a = runs[0].samples[k];
                const auto& b = runs[1].samples[k];
                tr.add_row({a.t, a.g1, a.g2, 0.5 * (a.mean_n + b.mean_n), 0.5 * (a.var_n + b.var_n),
                            0.5 * (a.fid_gs + b.fid_gs), 0.5 * (a.c2_sq + b.c2_sq), 0.5 * (a.parity + b.parity)});
            }
            res.records.push_back(std::move(tr));
        }
        break;
    }
    }

    if (traj) {
        for (int k = 0; k < K; ++k) {
            N[k] = traj->samples[k].mean_n;
            c2[k] = traj->samples[k].c2_sq;
            if (!cfg.outputs.qfi && !cfg.outputs.snr) continue;
            const DynamicQfi q = dynamic_qfi(*ladder, k, omega);
            F_fid[k] = q.F;
            if (q.level < 0) {
                ++res.flagged_samples;
                continue;
            }
            const LevelData& d = ladder->at(q.level);
            const double var = traj->samples[k].var_n;
            if (var >= 1e-14) S[k] = std::pow((d.n_plus[k] - d.n_minus[k]) / ladder->h(q.level), 2) / var;
        }
        if (cfg.outputs.trajectory && cfg.engine != Engine::Lindblad) {
            OutputRecord tr{"trajectory", {}, {"t", "g1", "g2", "mean_n", "var_n", "fid_gs", "c2_sq", "parity"}, {}};
            for (const auto& o : traj->samples)
                tr.add_row({o.t, o.g1, o.g2, o.mean_n, o.var_n, o.fid_gs, o.c2_sq, o.parity});
            res.records.push_back(std::move(tr));
        }
    }

    OutputRecord sweep{"sweep", {}, {"s", spec.control(), "T", "F_analytic", "F_fidelity", "c2_sq", "N"}, {}};
    if (cfg.outputs.snr) sweep.columns.push_back(cfg.engine == Engine::Lindblad ? "S_psi" : "S");
    if (cfg.engine == Engine::Lindblad) {
        sweep.columns.push_back("S_rho");
        sweep.columns.push_back("N_rho");
        sweep.columns.push_back("fid_gs_rho");
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> row{s[k], ctrl[k], T[k], F_an[k], F_fid[k], c2[k], N[k]};
        if (cfg.outputs.snr) row.push_back(S[k]);
        if (cfg.engine == Engine::Lindblad) {
            row.push_back(S_rho[k]);
            row.push_back(N_rho[k]);
            row.push_back(fid_rho[k]);
        }
        sweep.add_row(row);
    }
    sweep.meta["flagged_samples"] = res.flagged_samples;
    sweep.meta["total_time"] = res.total_time;
    sweep.meta["schedule_certificate"] = sch.certificate();
    res.records.insert(res.records.begin(), std::move(sweep));

    if (cfg.outputs.fits) {
        std::vector<double> d(K);
        for (int k = 0; k < K; ++k) d[k] = fit_distance(spec, s[k]);
        const double d_end = fit_distance(spec, cfg.end());
        const double d_hi = d_end * std::pow(10.0, cfg.fit_decades);
        FitWindow wd{d_end * (1.0 - 1e-12), d_hi};
        // T window matching the distance window.
        double t_lo = std::numeric_limits<double>::infinity(), t_hi = 0.0;
        for (int k = 0; k < K; ++k)
            if (d[k] >= wd.lo && d[k] <= wd.hi) {
                t_lo = std::min(t_lo, T[k]);
                t_hi = std::max(t_hi, T[k]);
            }
        FitWindow wt{t_lo, t_hi};
        std::vector<std::pair<std::string, const std::vector<double>*>> targets{{"F_analytic", &F_an}};
        if (cfg.engine != Engine::Analytic || cfg.outputs.qfi) targets.push_back({"F_fidelity", &F_fid});
        const bool custom = cfg.ramp.law == RampLaw::Custom;
        const ScalingClass sc = res.prediction.scaling;
        if (custom || sc == ScalingClass::ExpSuperHS) {
            add_fit(res, "T~s", d, T, FitModel::LogTime, wd);
            for (const auto& [name, v] : targets) add_fit(res, name + "~T", T, *v, FitModel::Exponential, wt);
        }
        if (custom || sc != ScalingClass::ExpSuperHS) {
            add_fit(res, "T~s|power", d, T, FitModel::InversePower, wd);
            for (const auto& [name, v] : targets) add_fit(res, name + "~T|power", T, *v, FitModel::Power, wt);
        }
        if (!custom && sc == ScalingClass::Heisenberg)
            for (const auto& [name, v] : targets) add_fit(res, name + "~T|b=2", T, *v, FitModel::Power, wt, 2.0);
        if (!custom && sc == ScalingClass::QuarticBoundary) {
            add_fit(res, "T~s|b=0.5", d, T, FitModel::InversePower, wd, 0.5);
            for (const auto& [name, v] : targets) add_fit(res, name + "~T|b=4", T, *v, FitModel::Power, wt, 4.0);
        }
        OutputRecord fr{"fits", {}, {"target", "model", "a", "a_err", "b", "b_err", "b_fixed", "window_lo", "window_hi", "rms", "n"}, {}};
        for (const auto& f : res.fits)
            fr.add_row({f.target, to_string(f.fit.model), format_number(f.fit.a), format_number(f.fit.a_err),
                        format_number(f.fit.b), format_number(f.fit.b_err), f.fit.b_fixed ? "1" : "0",
                        format_number(f.fit.window_lo), format_number(f.fit.window_hi), format_number(f.fit.rms),
                        std::to_string(f.fit.n)});
        res.records.push_back(std::move(fr));
    }

    OutputRecord pr{"prediction", {{"scaling", to_string(res.prediction.scaling)}}, {"key", "value"}, {}};
    pr.add_row({"T_closed", format_number(res.prediction.T_closed)});
    pr.add_row({"N_final", format_number(res.prediction.N_final)});
    pr.add_row({"F_final", format_number(res.prediction.F_final)});
    pr.add_row({"excitation", format_number(res.prediction.excitation)});
    for (const auto& [key, value] : res.prediction.coefficients) pr.add_row({key, format_number(value)});
    res.records.push_back(std::move(pr));

    const nlohmann::json cj = cfg.to_json();
    for (auto& r : res.records) {
        r.meta["config_hash"] = cfg.hash();
        r.meta["artifact_version"] = kArtifactVersion;
        r.meta["preset"] = cfg.preset;
        r.meta["engine"] = to_string(cfg.engine);
        r.meta["config"] = cj;
    }
    return res;
}

}  // namespace critmet

namespace critmet {

OutputRecord evolve_once(const SweepConfig& cfg)
{
    cfg.validate();
    const Schedule sch = build_schedule(cfg.path, cfg.ramp, cfg.start(), cfg.end(), cfg.grid);
    Trajectory traj;
    switch (cfg.engine) {
    case Engine::Analytic: throw UnsupportedCombo("evolve: the analytic engine has no trajectory");
    case Engine::Gaussian: traj = gaussian_evolve(sch); break;
    case Engine::Schrodinger: {
        const FockBasis basis(cfg.n_max);
        traj = schrodinger_evolve(np_model(cfg.path, basis), sch, np_ground_at_start(cfg.path, sch, basis));
        break;
    }
    case Engine::Lindblad: {
        const HamiltonianModel m = lindblad_model(cfg, cfg.path.omega);
        traj = lindblad_evolve(m, sch, *cfg.dissipation, lindblad_initial(m, sch));
        break;
    }
    }
    const bool open = cfg.engine == Engine::Lindblad;
    OutputRecord tr{"evolve", {}, {"t", "g1", "g2", "mean_n", "var_n", "fid_gs", "c2_sq", "parity"}, {}};
    if (open) tr.columns.push_back("sigma_z");
    for (const auto& o : traj.samples) {
        std::vector<double> row{o.t, o.g1, o.g2, o.mean_n, o.var_n, o.fid_gs, o.c2_sq, o.parity};
        if (open) row.push_back(o.sigma_z);
        tr.add_row(row);
    }
    tr.meta = {{"config_hash", cfg.hash()},
               {"artifact_version", kArtifactVersion},
               {"preset", cfg.preset},
               {"engine", to_string(cfg.engine)},
               {"config", cfg.to_json()},
               {"steps", traj.steps},
               {"max_norm_deviation", traj.max_norm_deviation},
               {"max_trace_deviation", traj.max_trace_deviation},
               {"max_leakage", traj.max_leakage}};
    return tr;
}

}  // namespace critmet
