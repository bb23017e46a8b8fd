#include "critmet/evolve.hpp"

#include <cmath>
#include <numbers>

#include "critmet/errors.hpp"

namespace critmet {

CMatrix HamiltonianModel::build(const PathPoint& pt) const
{
    const std::vector<double> c = coefficients(pt);
    if (c.size() != terms.size()) throw RangeError("HamiltonianModel: coefficient count mismatch");
    CMatrix h = CMatrix::Zero(basis.dim(), basis.dim());
    for (std::size_t j = 0; j < terms.size(); ++j)
        if (c[j] != 0.0) h += c[j] * terms[j];
    return h;
}

HamiltonianModel np_model(const PathSpec& spec, const FockBasis& basis)
{
    if (basis.with_spin()) throw RangeError("np_model: bosonic basis required");
    const auto ops = build_ladder_ops(basis);
    const CMatrix& a = ops.a.matrix();
    const CMatrix& ad = ops.adag.matrix();
    HamiltonianModel m{basis, {ops.n.matrix(), a * a + ad * ad}, nullptr, 0.0};
    m.coefficients = [spec](const PathPoint& pt) {
        const QuadraticForm q = quadratic_at(spec, pt);
        return std::vector<double>{q.A, q.C};
    };
    return m;
}

HamiltonianModel full_aqrm_model(double Omega, double omega, const FockBasis& basis)
{
    if (!basis.with_spin()) throw RangeError("full_aqrm_model: spin basis required");
    const auto b = build_ladder_ops(basis);
    const auto s = build_spin_ops(basis);
    const CMatrix& a = b.a.matrix();
    const CMatrix& ad = b.adag.matrix();
    const CMatrix& sp = s.sp.matrix();
    const CMatrix& sm = s.sm.matrix();
    HamiltonianModel m{basis,
                       {0.5 * s.sz.matrix(), b.n.matrix(), 0.5 * (ad * sm + a * sp), 0.5 * (ad * sp + a * sm)},
                       nullptr,
                       Omega / omega};
    m.coefficients = [Omega, omega](const PathPoint& pt) { return std::vector<double>{Omega, omega, pt.g1, pt.g2}; };
    return m;
}

GaussianState GaussianState::squeezed_vacuum(double gamma)
{
    GaussianState g;
    g.cov << 0.5 * std::exp(-2.0 * gamma), 0.0, 0.0, 0.5 * std::exp(2.0 * gamma);
    return g;
}

double GaussianState::mean_n() const { return 0.5 * (cov.trace() + mean.squaredNorm() - 1.0); }

double GaussianState::var_n() const
{
    return 0.5 * ((cov * cov).trace() - 0.5) + mean.dot(cov * mean);
}

double GaussianState::parity() const
{
    return std::exp(-0.5 * mean.dot(cov.inverse() * mean)) / (2.0 * std::sqrt(cov.determinant()));
}

double GaussianState::fidelity(const GaussianState& o) const
{
    // Pure-state overlap |<a|b>|^2 of two Gaussian states.
    const Eigen::Matrix2d sum = cov + o.cov;
    const Eigen::Vector2d d = mean - o.mean;
    return std::exp(-0.5 * d.dot(sum.inverse() * d)) / std::sqrt(sum.determinant());
}

GaussianState gaussian_step(const GaussianState& g, const QuadraticForm& q, double dt)
{
    // H = a x^2 + b p^2: xdot = 2 b p, pdot = -2 a x
    const double a = 0.5 * q.A + q.C, b = 0.5 * q.A - q.C;
    if (!(a > 0.0 && b > 0.0)) throw GapClosed("gaussian_step: quadratic form is not positive");
    const double w = 2.0 * std::sqrt(a * b);
    const double c = std::cos(w * dt), s = std::sin(w * dt);
    Eigen::Matrix2d M;
    M << c, 2.0 * b / w * s, -2.0 * a / w * s, c;
    GaussianState out;
    out.mean = M * g.mean;
    out.cov = M * g.cov * M.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

namespace {

PathPoint sample_point(const Schedule& sch, int k)
{
    const auto& x = sch.samples()[k];
    return {x.s, x.g1, x.g2};
}

double top_decile_population(const PureState& psi)
{
    const FockBasis& b = psi.basis;
    const int cut = b.n_max() - std::max(1, b.boson_dim() / 10);
    double p = 0.0;
    for (int i = 0; i < b.dim(); ++i)
        if (b.photons(i) > cut) p += std::norm(psi.amp(i));
    return p;
}

void fill_moments(SampleObservables& o, const BosonMoments& m)
{
    o.mean_n = m.mean_n;
    o.var_n = m.var_n;
    o.mean_x = m.mean_x;
    o.mean_p = m.mean_p;
    o.var_x = m.var_x;
    o.var_p = m.var_p;
    o.cov_xp = m.cov_xp;
}

double sigma_z_of(const PureState& psi)
{
    double sz = 0.0;
    for (int i = 0; i < psi.basis.dim(); ++i) sz += (psi.basis.spin(i) == 1 ? 1.0 : -1.0) * std::norm(psi.amp(i));
    return sz;
}

SampleObservables observe_pure(const HamiltonianModel& model, const Schedule& sch, int k, double t,
                               const PureState& psi, bool instantaneous)
{
    const PathPoint pt = sample_point(sch, k);
    SampleObservables o;
    o.t = t;
    o.s = pt.s;
    o.g1 = pt.g1;
    o.g2 = pt.g2;
    fill_moments(o, boson_moments(psi));
    o.parity = parity_expectation(psi);
    if (psi.basis.with_spin()) o.sigma_z = sigma_z_of(psi);
    if (instantaneous) {
        const EigenSystem es = eig_hermitian_fast(model.build(pt), model.basis);
        o.fid_gs = std::norm(es.vectors.col(0).dot(psi.amp));
        o.c2_sq = std::norm(es.vectors.col(2).dot(psi.amp));
    }
    return o;
}

struct PureRun {
    CVector psi;
    Trajectory traj;
};

PureRun run_pure(const HamiltonianModel& model, const Schedule& sch, const PureState& psi0, int refine,
                 double dt_max, bool keep, bool instantaneous)
{
    const TimeGrid grid = dynamics_grid(sch, refine, dt_max);
    PureRun run{psi0.amp, {}};
    Trajectory& tr = run.traj;
    auto record = [&](int k, double t) {
        PureState st(model.basis, run.psi);
        tr.max_norm_deviation = std::max(tr.max_norm_deviation, std::abs(run.psi.norm() - 1.0));
        const double leak = top_decile_population(st);
        tr.max_leakage = std::max(tr.max_leakage, leak);
        if (leak > 1e-6) throw TruncationError("schrodinger_evolve: population reaches the top of the Fock truncation");
        tr.samples.push_back(observe_pure(model, sch, k, t, st, instantaneous));
        if (keep) tr.states.push_back(st);
    };
    record(0, grid.t[0]);
    for (std::size_t j = 0; j + 1 < grid.t.size(); ++j) {
        const double dt = grid.t[j + 1] - grid.t[j];
        const double s = sch.s_at(0.5 * (grid.t[j] + grid.t[j + 1]), grid.interval[j]);
        const EigenSystem es = eig_hermitian_fast(model.build(path_point(sch.spec(), s)), model.basis);
        CVector c = es.vectors.adjoint() * run.psi;
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -es.values(i) * dt);
        run.psi = es.vectors * c;
        ++tr.steps;
        if (grid.sample[j + 1] >= 0) record(grid.sample[j + 1], grid.t[j + 1]);
    }
    tr.final_state = PureState(model.basis, run.psi);
    return run;
}

}  // namespace

Trajectory schrodinger_evolve(const HamiltonianModel& model, const Schedule& schedule, const PureState& psi0,
                              const EvolveOptions& opt)
{
    if (!(psi0.basis == model.basis)) throw RangeError("schrodinger_evolve: state and model bases differ");
    if (psi0.norm_deviation() > 1e-10) throw RangeError("schrodinger_evolve: initial state not normalized");
    if (schedule.samples().size() < 2) throw RangeError("schrodinger_evolve: empty schedule");
    PureRun base = run_pure(model, schedule, psi0, opt.refine, opt.dt_max, opt.keep_states,
                            opt.instantaneous_observables);
    if (opt.certify_order) {
        const PureRun r2 = run_pure(model, schedule, psi0, 2 * opt.refine, opt.dt_max, false, false);
        const PureRun r4 = run_pure(model, schedule, psi0, 4 * opt.refine, opt.dt_max, false, false);
        const double e1 = (base.psi - r2.psi).norm();
        const double e2 = (r2.psi - r4.psi).norm();
        base.traj.order_ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
        // Below ~1e-11 the difference is roundoff, not discretization error.
        if (e1 > 1e-11 && base.traj.order_ratio < 3.5)
            throw StepRejection("schrodinger_evolve: second-order certificate failed (ratio " +
                                std::to_string(base.traj.order_ratio) + ")");
    }
    return std::move(base.traj);
}

namespace {

PathSpec hamiltonian_spec(const Schedule& sch, const EvolveOptions& opt)
{
    return opt.hamiltonian_omega ? sch.spec().with_omega(*opt.hamiltonian_omega) : sch.spec();
}

SampleObservables observe_gaussian(const Schedule& sch, const PathSpec& hspec, int k, double t,
                                   const GaussianState& g)
{
    const PathPoint pt = sample_point(sch, k);
    const QuadraticForm q = quadratic_at(hspec, pt);
    SampleObservables o;
    o.t = t;
    o.s = pt.s;
    o.g1 = pt.g1;
    o.g2 = pt.g2;
    o.mean_n = g.mean_n();
    o.var_n = g.var_n();
    o.mean_x = g.mean(0);
    o.mean_p = g.mean(1);
    o.var_x = g.cov(0, 0);
    o.var_p = g.cov(1, 1);
    o.cov_xp = g.cov(0, 1);
    o.parity = g.parity();
    const double gam = q.gamma();
    o.fid_gs = g.fidelity(GaussianState::squeezed_vacuum(gam));
    // Instantaneous frame: Gamma^dag maps the local ground covariance to 1/2.
    Eigen::Matrix2d S;
    S << std::exp(gam), 0.0, 0.0, std::exp(-gam);
    const double ch2r = (S * g.cov * S).trace();  // cosh 2r of the residual squeezing
    const double r = 0.5 * std::acosh(std::max(1.0, ch2r));
    o.c2_sq = std::pow(std::tanh(r), 2) / (2.0 * std::cosh(r));
    return o;
}

GaussianState run_gaussian(const Schedule& sch, const PathSpec& hspec, const GaussianState& init, int refine,
                           double dt_max, Trajectory* tr, bool keep)
{
    const TimeGrid grid = dynamics_grid(sch, refine, dt_max);
    GaussianState g = init;
    auto record = [&](int k, double t) {
        if (!tr) return;
        tr->max_purity_error = std::max(tr->max_purity_error, std::abs(g.purity_det() - 0.25));
        tr->samples.push_back(observe_gaussian(sch, hspec, k, t, g));
        if (keep) tr->gaussians.push_back(g);
    };
    record(0, grid.t[0]);
    for (std::size_t j = 0; j + 1 < grid.t.size(); ++j) {
        const double dt = grid.t[j + 1] - grid.t[j];
        const double s = sch.s_at(0.5 * (grid.t[j] + grid.t[j + 1]), grid.interval[j]);
        g = gaussian_step(g, quadratic_at(hspec, path_point(sch.spec(), s)), dt);
        if (tr) ++tr->steps;
        if (grid.sample[j + 1] >= 0) record(grid.sample[j + 1], grid.t[j + 1]);
    }
    return g;
}

}  // namespace

Trajectory gaussian_evolve(const Schedule& schedule, const GaussianState& initial, const EvolveOptions& opt)
{
    if (schedule.samples().size() < 2) throw RangeError("gaussian_evolve: empty schedule");
    Trajectory tr;
    const PathSpec hspec = hamiltonian_spec(schedule, opt);
    GaussianState g = run_gaussian(schedule, hspec, initial, opt.refine, opt.dt_max, &tr, opt.keep_states);
    if (opt.certify_order) {
        const GaussianState g2 = run_gaussian(schedule, hspec, initial, 2 * opt.refine, opt.dt_max, nullptr, false);
        const GaussianState g4 = run_gaussian(schedule, hspec, initial, 4 * opt.refine, opt.dt_max, nullptr, false);
        const double e1 = (g.cov - g2.cov).norm() + (g.mean - g2.mean).norm();
        const double e2 = (g2.cov - g4.cov).norm() + (g2.mean - g4.mean).norm();
        tr.order_ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
        if (e1 > 1e-11 && tr.order_ratio < 3.5)
            throw StepRejection("gaussian_evolve: second-order certificate failed");
    }
    tr.final_gaussian = g;
    return tr;
}

Trajectory gaussian_evolve(const Schedule& schedule, const EvolveOptions& opt)
{
    if (schedule.samples().empty()) throw RangeError("gaussian_evolve: empty schedule");
    const double gamma0 = quadratic_at(hamiltonian_spec(schedule, opt), sample_point(schedule, 0)).gamma();
    return gaussian_evolve(schedule, GaussianState::squeezed_vacuum(gamma0), opt);
}

ExcitationSeries excitation_amplitude(const Schedule& schedule)
{
    const auto& smp = schedule.samples();
    if (smp.size() < 2) throw RangeError("excitation_amplitude: empty schedule");
    const PathSpec& spec = schedule.spec();
    const RampSpec& ramp = schedule.ramp();
    const double scale = spec.scale();
    auto phase_rate = [&](double s) { return 2.0 * path_gap(spec, s) / ramp_rate(spec, ramp, s); };
    ExcitationSeries out;
    std::complex<double> c2 = 0.0;
    double theta = 0.0;
    out.records.push_back({smp[0].t, smp[0].s, c2, theta, -path_dgamma_ds(spec, smp[0].s) / scale});
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
        const double a = smp[i].s, b = smp[i + 1].s;
        const double advance = std::abs(gauss_legendre8(phase_rate, a, b));
        if (advance > std::numbers::pi) ++out.refinements;
        const int m = std::max(1, int(std::ceil(advance / 0.25)));
        for (int j = 0; j < m; ++j) {
            const double p = a + (b - a) * j / m, q = a + (b - a) * (j + 1) / m;
            const double c = 0.5 * (p + q), h = 0.5 * (q - p);
            std::complex<double> piece = 0.0;
            for (int n = 0; n < 4; ++n)
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double x = c + sgn * h * detail::kGL8x[n];
                    const double th = theta + std::abs(gauss_legendre8(phase_rate, p, x));
                    piece += detail::kGL8w[n] * std::polar(1.0, th) * path_dgamma_ds(spec, x);
                }
            c2 += piece * h / std::sqrt(2.0);
            theta += std::abs(gauss_legendre8(phase_rate, p, q));
        }
        out.records.push_back({smp[i + 1].t, b, c2, theta, -path_dgamma_ds(spec, b) / scale});
    }
    return out;
}

std::vector<std::complex<double>> instantaneous_decompose(const PureState& psi, double gamma, int n_keep)
{
    if (n_keep < 0 || n_keep > psi.basis.n_max()) throw RangeError("instantaneous_decompose: bad n_keep");
    const ComplexOperator G = build_squeeze_op(psi.basis, gamma);
    const CVector c = G.matrix().adjoint() * psi.amp;
    std::vector<std::complex<double>> out(c.data(), c.data() + n_keep + 1);
    double w = 0.0;
    for (const auto& x : out) w += std::norm(x);
    if (w < 1.0 - 1e-6) throw TruncationError("instantaneous_decompose: retained levels miss more than 1e-6");
    return out;
}

std::vector<std::complex<double>> instantaneous_decompose(const PureState& psi, const AqrmParams& p, int n_keep)
{
    return instantaneous_decompose(psi, np_solution(p).gamma, n_keep);
}

}  // namespace critmet
