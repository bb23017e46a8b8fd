#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <Eigen/Sparse>

#include "critmet/errors.hpp"
#include "critmet/evolve.hpp"

namespace critmet {

namespace {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Blocks = std::vector<CMatrix>;

// Generalized parity (photons + spin) mod 2 splits the space in two sectors
// that every supported Hamiltonian preserves and every collapse operator swaps.
// rho stays block diagonal, so only the two diagonal blocks are propagated.
struct Sectors {
    std::vector<std::vector<int>> idx;
    std::vector<int> sector_of;
    std::vector<int> local_of;
};

Sectors single_sector(int dim)
{
    Sectors s;
    s.idx.resize(1);
    s.sector_of.assign(dim, 0);
    s.local_of.resize(dim);
    for (int i = 0; i < dim; ++i) {
        s.idx[0].push_back(i);
        s.local_of[i] = i;
    }
    return s;
}

Sectors parity_sectors(const FockBasis& b)
{
    Sectors s;
    s.idx.resize(2);
    s.sector_of.resize(b.dim());
    s.local_of.resize(b.dim());
    for (int i = 0; i < b.dim(); ++i) {
        const int p = (b.photons(i) + b.spin(i)) % 2;
        s.sector_of[i] = p;
        s.local_of[i] = int(s.idx[p].size());
        s.idx[p].push_back(i);
    }
    return s;
}

bool preserves_sectors(const CMatrix& m, const Sectors& s)
{
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (s.sector_of[r] != s.sector_of[c] && m(r, c) != cplx(0.0)) return false;
    return true;
}

// Target sector of each source sector, or empty if `m` mixes sectors.
std::vector<int> sector_map(const CMatrix& m, const Sectors& s)
{
    std::vector<int> target(s.idx.size(), -1);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (m(r, c) == cplx(0.0)) continue;
            int& t = target[s.sector_of[c]];
            if (t >= 0 && t != s.sector_of[r]) return {};
            t = s.sector_of[r];
        }
    return target;
}

bool block_diagonal(const CMatrix& rho, const Sectors& s)
{
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        for (Eigen::Index r = 0; r < rho.rows(); ++r)
            if (s.sector_of[r] != s.sector_of[c] && std::abs(rho(r, c)) > 1e-14) return false;
    return true;
}

SpMat sub_block(const CMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const cplx v = m(rows[r], cols[c]);
            if (v != cplx(0.0)) t.emplace_back(int(r), int(c), v);
        }
    SpMat out(int(rows.size()), int(cols.size()));
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

struct Jump {
    std::vector<int> target;
    std::vector<SpMat> op;   // source block -> target block, scaled by sqrt(kappa)
    std::vector<SpMat> adj;  // its adjoint
};

// Right-hand side of d rho/dt = -i[H, rho] + sum kappa L[O] rho on sector blocks.
// H_eff = H - (i/2) sum kappa O^dag O shares one sparsity pattern per block so
// updating the time dependence is an axpy over stored values.
class MasterEquation {
public:
    MasterEquation(const std::vector<CMatrix>& terms, const std::vector<CMatrix>& collapse,
                   const std::vector<double>& kappas, const Sectors& sectors)
        : sectors_(sectors)
    {
        const int nb = int(sectors_.idx.size());
        const Eigen::Index dim = terms.empty() ? collapse.front().rows() : terms.front().rows();
        CMatrix damping = CMatrix::Zero(dim, dim);
        for (std::size_t j = 0; j < collapse.size(); ++j) {
            if (kappas[j] == 0.0) continue;
            damping += cplx(0.0, -0.5 * kappas[j]) * (collapse[j].adjoint() * collapse[j]);
            Jump jp;
            jp.target = sector_map(collapse[j], sectors_);
            for (int b = 0; b < nb; ++b) {
                const int t = jp.target[b] >= 0 ? jp.target[b] : b;
                jp.target[b] = t;
                SpMat op = std::sqrt(kappas[j]) * sub_block(collapse[j], sectors_.idx[t], sectors_.idx[b]);
                jp.adj.push_back(SpMat(op.adjoint()));
                jp.op.push_back(std::move(op));
            }
            jumps_.push_back(std::move(jp));
        }
        std::vector<CMatrix> all = terms;
        all.push_back(damping);
        n_terms_ = int(terms.size());
        for (int b = 0; b < nb; ++b) {
            const auto& ix = sectors_.idx[b];
            std::set<std::pair<int, int>> pattern;
            for (const auto& m : all)
                for (std::size_t r = 0; r < ix.size(); ++r)
                    for (std::size_t c = 0; c < ix.size(); ++c)
                        if (m(ix[r], ix[c]) != cplx(0.0)) pattern.insert({int(r), int(c)});
            std::vector<Eigen::VectorXcd> vals;
            SpMat shape;
            for (const auto& m : all) {
                std::vector<Eigen::Triplet<cplx>> t;
                for (const auto& [r, c] : pattern) t.emplace_back(r, c, m(ix[r], ix[c]));
                SpMat s(int(ix.size()), int(ix.size()));
                s.setFromTriplets(t.begin(), t.end());
                s.makeCompressed();
                vals.push_back(Eigen::Map<const Eigen::VectorXcd>(s.valuePtr(), s.nonZeros()));
                shape = s;
            }
            heff_.push_back(shape);
            term_vals_.push_back(std::move(vals));
        }
        scratch_.resize(nb);
    }

    int blocks() const { return int(sectors_.idx.size()); }

    void set_coefficients(const std::vector<double>& c)
    {
        if (int(c.size()) != n_terms_) throw RangeError("lindblad: coefficient count mismatch");
        for (std::size_t b = 0; b < heff_.size(); ++b) {
            Eigen::Map<Eigen::VectorXcd> v(heff_[b].valuePtr(), heff_[b].nonZeros());
            v = term_vals_[b][n_terms_];
            for (int j = 0; j < n_terms_; ++j)
                if (c[j] != 0.0) v += c[j] * term_vals_[b][j];
        }
    }

    void rhs(const Blocks& rho, Blocks& out)
    {
        for (std::size_t b = 0; b < rho.size(); ++b) {
            scratch_[b].noalias() = heff_[b] * rho[b];
            scratch_[b] *= cplx(0.0, -1.0);
            out[b] = scratch_[b] + scratch_[b].adjoint();
        }
        for (const auto& jp : jumps_)
            for (std::size_t b = 0; b < rho.size(); ++b) {
                scratch_[b].noalias() = jp.op[b] * rho[b];
                out[jp.target[b]].noalias() += scratch_[b] * jp.adj[b];
            }
    }

    Blocks split(const CMatrix& rho) const
    {
        Blocks out;
        for (const auto& ix : sectors_.idx) {
            CMatrix m(ix.size(), ix.size());
            for (std::size_t r = 0; r < ix.size(); ++r)
                for (std::size_t c = 0; c < ix.size(); ++c) m(r, c) = rho(ix[r], ix[c]);
            out.push_back(std::move(m));
        }
        return out;
    }

    CMatrix join(const Blocks& blocks, Eigen::Index dim) const
    {
        CMatrix rho = CMatrix::Zero(dim, dim);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& ix = sectors_.idx[b];
            for (std::size_t r = 0; r < ix.size(); ++r)
                for (std::size_t c = 0; c < ix.size(); ++c) rho(ix[r], ix[c]) = blocks[b](r, c);
        }
        return rho;
    }

private:
    Sectors sectors_;
    int n_terms_ = 0;
    std::vector<SpMat> heff_;
    std::vector<std::vector<Eigen::VectorXcd>> term_vals_;
    std::vector<Jump> jumps_;
    Blocks scratch_;
};

// Classic RK4 over [t0, t0 + n dt] with coefficients evaluated at t.
template <class Coeffs>
void rk4(MasterEquation& eq, Blocks& rho, double t0, double dt, int n, Coeffs&& coeffs)
{
    const std::size_t nb = rho.size();
    Blocks k1(nb), k2(nb), k3(nb), k4(nb), y(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        k1[b].resize(rho[b].rows(), rho[b].cols());
        k2[b] = k3[b] = k4[b] = y[b] = k1[b];
    }
    for (int i = 0; i < n; ++i) {
        const double t = t0 + i * dt;
        eq.set_coefficients(coeffs(t));
        eq.rhs(rho, k1);
        for (std::size_t b = 0; b < nb; ++b) y[b] = rho[b] + (0.5 * dt) * k1[b];
        eq.set_coefficients(coeffs(t + 0.5 * dt));
        eq.rhs(y, k2);
        for (std::size_t b = 0; b < nb; ++b) y[b] = rho[b] + (0.5 * dt) * k2[b];
        eq.rhs(y, k3);
        for (std::size_t b = 0; b < nb; ++b) y[b] = rho[b] + dt * k3[b];
        eq.set_coefficients(coeffs(t + dt));
        eq.rhs(y, k4);
        for (std::size_t b = 0; b < nb; ++b) {
            rho[b] += (dt / 6.0) * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b]);
            y[b] = 0.5 * (rho[b] + rho[b].adjoint());
            rho[b] = y[b];
        }
    }
}

double min_block_eigenvalue(const Blocks& rho)
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : rho) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(b, Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

double spectral_spread(const CMatrix& h)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

struct MixedRun {
    CMatrix rho;
    Trajectory traj;
};

MixedRun run_mixed(const HamiltonianModel& model, const Schedule& sch, const LindbladConfig& cfg,
                   const std::vector<CMatrix>& collapse, const std::vector<double>& kappas, const DensityOperator& rho0,
                   int refine, bool keep, bool instantaneous)
{
    Sectors sectors = parity_sectors(model.basis);
    bool ok = block_diagonal(rho0.rho, sectors);
    for (const auto& t : model.terms) ok = ok && preserves_sectors(t, sectors);
    for (const auto& c : collapse) ok = ok && !sector_map(c, sectors).empty();
    if (!ok) sectors = single_sector(model.basis.dim());

    MasterEquation eq(model.terms, collapse, kappas, sectors);
    const auto& smp = sch.samples();
    const PathSpec& spec = sch.spec();

    double dt_cap = cfg.dt_max;
    if (dt_cap <= 0.0) {
        // RK4 is stable for |lambda dt| < 2.8; the commutator spectrum spans the spread of H.
        const double spread = std::max(spectral_spread(model.build({smp.front().s, smp.front().g1, smp.front().g2})),
                                       spectral_spread(model.build({smp.back().s, smp.back().g1, smp.back().g2})));
        dt_cap = 2.0 / spread;
    }

    MixedRun run{CMatrix(), {}};
    Trajectory& tr = run.traj;
    tr.kappa_a_ignored = cfg.mode == LindbladMode::BosonicOnly && cfg.kappa_a > 0.0;
    tr.min_eigenvalue = std::numeric_limits<double>::infinity();
    const Eigen::Index dim = model.basis.dim();

    auto record = [&](int k, const Blocks& blocks) {
        DensityOperator rho(model.basis, eq.join(blocks, dim));
        tr.max_trace_deviation = std::max(tr.max_trace_deviation, rho.trace_deviation());
        tr.max_hermiticity_error = std::max(tr.max_hermiticity_error, rho.hermiticity_error());
        const PathPoint pt{smp[k].s, smp[k].g1, smp[k].g2};
        SampleObservables o;
        o.t = smp[k].t;
        o.s = pt.s;
        o.g1 = pt.g1;
        o.g2 = pt.g2;
        const BosonMoments m = boson_moments(rho);
        o.mean_n = m.mean_n;
        o.var_n = m.var_n;
        o.mean_x = m.mean_x;
        o.mean_p = m.mean_p;
        o.var_x = m.var_x;
        o.var_p = m.var_p;
        o.cov_xp = m.cov_xp;
        o.parity = parity_expectation(rho);
        if (model.basis.with_spin()) {
            double sz = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) sz += (model.basis.spin(int(i)) == 1 ? 1.0 : -1.0) * rho.rho(i, i).real();
            o.sigma_z = sz;
        }
        if (instantaneous) {
            const EigenSystem es = eig_hermitian_fast(model.build(pt), model.basis);
            o.fid_gs = es.vectors.col(0).dot(rho.rho * es.vectors.col(0)).real();
            o.c2_sq = es.vectors.col(2).dot(rho.rho * es.vectors.col(2)).real();
        }
        tr.samples.push_back(o);
        if (keep) tr.rhos.push_back(rho);
        return rho;
    };

    Blocks rho = eq.split(rho0.rho);
    tr.min_eigenvalue = min_block_eigenvalue(rho);
    record(0, rho);
    for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
        const double t0 = smp[k].t, t1 = smp[k + 1].t;
        const double span = t1 - t0;
        double h = dt_cap;
        for (const auto* x : {&smp[k], &smp[k + 1]}) {
            if (x->v > 0.0) h = std::min(h, 1e-3 / x->v);
            if (x->gap > 0.0) h = std::min(h, 0.1 / x->gap);
        }
        int n = std::max(1, int(std::ceil(span / h))) * refine;
        auto coeffs = [&](double t) {
            const double s = sch.s_at(std::clamp(t, t0, t1), int(k));
            return model.coefficients(path_point(spec, s));
        };
        for (int attempt = 0;; ++attempt) {
            Blocks trial = rho;
            rk4(eq, trial, t0, span / n, n, coeffs);
            const double lam = min_block_eigenvalue(trial);
            if (lam < -1e-6 && attempt < cfg.max_retries) {
                ++tr.positivity_retries;
                n *= 2;
                continue;
            }
            if (lam < -1e-4)
                throw PositivityError("lindblad_evolve: density matrix lost positivity (min eigenvalue " +
                                      std::to_string(lam) + ")");
            tr.min_eigenvalue = std::min(tr.min_eigenvalue, lam);
            tr.steps += n;
            rho = std::move(trial);
            break;
        }
        const DensityOperator d = record(int(k + 1), rho);
        if (k + 2 == smp.size()) tr.final_rho = d;
    }
    run.rho = eq.join(rho, dim);
    return run;
}

}  // namespace

Trajectory lindblad_evolve(const HamiltonianModel& model, const Schedule& schedule, const LindbladConfig& config,
                           const DensityOperator& rho0, const EvolveOptions& opt)
{
    if (!(config.kappa_p >= 0.0) || !(config.kappa_a >= 0.0))
        throw RangeError("lindblad_evolve: dissipation rates must be non-negative");
    if (!(rho0.basis == model.basis)) throw RangeError("lindblad_evolve: state and model bases differ");
    if (schedule.samples().size() < 2) throw RangeError("lindblad_evolve: empty schedule");
    if (rho0.trace_deviation() > 1e-8) throw RangeError("lindblad_evolve: initial state not normalized");

    const auto ladder = build_ladder_ops(model.basis);
    std::vector<CMatrix> collapse{ladder.a.matrix()};
    std::vector<double> kappas{config.kappa_p};
    if (config.mode == LindbladMode::FullModel) {
        if (!model.basis.with_spin()) throw UnsupportedCombo("lindblad_evolve: FullModel needs a spin basis");
        if (!(model.frequency_ratio > 0.0) || model.frequency_ratio > 1e3)
            throw UnsupportedCombo("lindblad_evolve: FullModel needs Omega/omega <= 1e3");
        collapse.push_back(build_spin_ops(model.basis).sm.matrix());
        kappas.push_back(config.kappa_a);
    } else if (model.basis.with_spin()) {
        throw UnsupportedCombo("lindblad_evolve: BosonicOnly runs the effective bosonic model");
    }

    MixedRun base = run_mixed(model, schedule, config, collapse, kappas, rho0, opt.refine, opt.keep_states,
                              opt.instantaneous_observables);
    if (opt.certify_order) {
        const MixedRun r2 = run_mixed(model, schedule, config, collapse, kappas, rho0, 2 * opt.refine, false, false);
        const MixedRun r4 = run_mixed(model, schedule, config, collapse, kappas, rho0, 4 * opt.refine, false, false);
        const double e1 = (base.rho - r2.rho).norm();
        const double e2 = (r2.rho - r4.rho).norm();
        base.traj.order_ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
        if (e1 > 1e-11 && base.traj.order_ratio < 12.0)
            throw StepRejection("lindblad_evolve: fourth-order certificate failed (ratio " +
                                std::to_string(base.traj.order_ratio) + ")");
    }
    return std::move(base.traj);
}

DensityOperator lindblad_propagate_static(const CMatrix& H, const std::vector<CMatrix>& collapse,
                                          const DensityOperator& rho0, double t, int steps)
{
    if (steps < 1 || !(t >= 0.0)) throw RangeError("lindblad_propagate_static: bad time grid");
    std::vector<double> kappas(collapse.size(), 1.0);  // rates folded into the operators
    Sectors sectors = parity_sectors(rho0.basis);
    bool ok = block_diagonal(rho0.rho, sectors) && preserves_sectors(H, sectors);
    for (const auto& c : collapse) ok = ok && !sector_map(c, sectors).empty();
    if (!ok) sectors = single_sector(rho0.basis.dim());
    MasterEquation eq({H}, collapse, kappas, sectors);
    Blocks rho = eq.split(rho0.rho);
    rk4(eq, rho, 0.0, t / steps, steps, [](double) { return std::vector<double>{1.0}; });
    return DensityOperator(rho0.basis, eq.join(rho, rho0.basis.dim()));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b)
{
    if (!(a.basis == b.basis)) throw RangeError("trace_distance: bases differ");
    const CMatrix d = a.rho - b.rho;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace critmet
