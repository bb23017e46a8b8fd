#include "critmet/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "critmet/errors.hpp"

namespace critmet {

FockBasis::FockBasis(int n_max, bool with_spin) : n_max_(n_max), with_spin_(with_spin)
{
    if (n_max < 2) throw RangeError("FockBasis: n_max must be >= 2");
}

bool hermitian_within(const CMatrix& m, double rel_tol)
{
    if (m.rows() != m.cols()) return false;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

ComplexOperator::ComplexOperator(const FockBasis& basis, CMatrix m)
    : basis_(basis), m_(std::move(m))
{
    if (m_.rows() != basis_.dim() || m_.cols() != basis_.dim())
        throw RangeError("ComplexOperator: matrix does not match basis dimension");
    hermitian_ = hermitian_within(m_);
}

double ComplexOperator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

PureState::PureState(const FockBasis& b, CVector v, double leakage)
    : basis(b), amp(std::move(v)), norm_leakage(leakage)
{
    if (amp.size() != basis.dim()) throw RangeError("PureState: vector does not match basis");
    const double nrm = amp.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("PureState: null or non-finite vector");
    amp /= nrm;
}

DensityOperator::DensityOperator(const FockBasis& b, CMatrix r) : basis(b), rho(std::move(r))
{
    if (rho.rows() != basis.dim() || rho.cols() != basis.dim())
        throw RangeError("DensityOperator: matrix does not match basis");
}

DensityOperator DensityOperator::from_pure(const PureState& psi)
{
    return DensityOperator(psi.basis, psi.amp * psi.amp.adjoint());
}

double DensityOperator::trace_deviation() const { return std::abs(rho.trace() - cplx(1.0)); }

double DensityOperator::hermiticity_error() const
{
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

PureState fock_state(const FockBasis& basis, int n, int spin)
{
    if (n < 0 || n > basis.n_max()) throw RangeError("fock_state: n outside truncation");
    if (spin != 0 && !basis.with_spin()) throw RangeError("fock_state: spin index without spin basis");
    CVector v = CVector::Zero(basis.dim());
    v(basis.index(n, spin)) = 1.0;
    return PureState(basis, v);
}

namespace {

CMatrix embed_boson(const FockBasis& basis, const CMatrix& b)
{
    if (!basis.with_spin()) return b;
    const int nb = basis.boson_dim();
    CMatrix m = CMatrix::Zero(basis.dim(), basis.dim());
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            if (b(i, j) != cplx(0.0))
                for (int s = 0; s < 2; ++s) m(2 * i + s, 2 * j + s) = b(i, j);
    return m;
}

CMatrix embed_spin(const FockBasis& basis, const Eigen::Matrix2cd& s)
{
    CMatrix m = CMatrix::Zero(basis.dim(), basis.dim());
    for (int n = 0; n < basis.boson_dim(); ++n)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(2 * n + i, 2 * n + j) = s(i, j);
    return m;
}

}  // namespace

LadderOps build_ladder_ops(const FockBasis& basis)
{
    const int nb = basis.boson_dim();
    CMatrix a = CMatrix::Zero(nb, nb);
    CMatrix n = CMatrix::Zero(nb, nb);
    for (int k = 1; k < nb; ++k) a(k - 1, k) = std::sqrt(double(k));
    for (int k = 0; k < nb; ++k) n(k, k) = double(k);
    return {ComplexOperator(basis, embed_boson(basis, a)),
            ComplexOperator(basis, embed_boson(basis, a.adjoint())),
            ComplexOperator(basis, embed_boson(basis, n))};
}

SpinOps build_spin_ops(const FockBasis& basis)
{
    if (!basis.with_spin()) throw RangeError("build_spin_ops: basis has no spin");
    Eigen::Matrix2cd sz, sp;
    sz << -1.0, 0.0, 0.0, 1.0;  // index 0 = down, 1 = up
    sp << 0.0, 0.0, 1.0, 0.0;   // |up><down|
    return {ComplexOperator(basis, embed_spin(basis, sz)),
            ComplexOperator(basis, embed_spin(basis, sp)),
            ComplexOperator(basis, embed_spin(basis, sp.adjoint()))};
}

int n_min_for_squeezing(double gamma)
{
    return int(std::ceil(12.0 * std::exp(2.0 * std::abs(gamma))));
}

double squeezed_vacuum_tail(double gamma, int n_max)
{
    // P(2m) = t^{2m} (2m)! / (4^m (m!)^2) / cosh r, t = tanh r
    const double t2 = std::pow(std::tanh(gamma), 2);
    double p = 1.0 / std::cosh(gamma);
    double tail = 0.0;
    for (int m = 1; m < 100000; ++m) {
        p *= t2 * (2.0 * m - 1.0) / (2.0 * m);
        if (2 * m > n_max) {
            tail += p;
            if (p < 1e-18 * std::max(tail, 1e-300)) break;
        }
        if (p == 0.0) break;
    }
    return tail;
}

double coherent_tail(double abs_alpha, int n_max)
{
    const double x = abs_alpha * abs_alpha;
    double p = std::exp(-x);
    double tail = 0.0;
    for (int n = 1; n < 100000; ++n) {
        p *= x / n;
        if (n > n_max) {
            tail += p;
            if (p < 1e-18 * std::max(tail, 1e-300) || p == 0.0) break;
        }
    }
    return tail;
}

CMatrix expm(const CMatrix& m)
{
    if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::MatrixXd r = m.real();
        Eigen::MatrixXd e = r.exp();
        return e.cast<cplx>();
    }
    return m.exp();
}

namespace {

void check_unitary(const CMatrix& u, const char* what)
{
    const CMatrix id = CMatrix::Identity(u.rows(), u.cols());
    const double err = (u.adjoint() * u - id).cwiseAbs().maxCoeff();
    if (err > 1e-8) throw TruncationError(std::string(what) + ": unitarity check failed");
}

}  // namespace

ComplexOperator build_squeeze_op(const FockBasis& basis, double gamma)
{
    if (basis.with_spin()) throw RangeError("build_squeeze_op: bosonic basis required");
    if (std::abs(gamma) > 5.0) throw RangeError("build_squeeze_op: |gamma| > 5");
    if (squeezed_vacuum_tail(gamma, basis.n_max()) > 1e-6)
        throw TruncationError("build_squeeze_op: squeezed vacuum leaks beyond n_max");
    const auto ops = build_ladder_ops(basis);
    const CMatrix& a = ops.a.matrix();
    const CMatrix& ad = ops.adag.matrix();
    const CMatrix u = expm(0.5 * gamma * (a * a - ad * ad));
    check_unitary(u, "build_squeeze_op");
    return ComplexOperator(basis, u);
}

ComplexOperator build_displacement_op(const FockBasis& basis, cplx alpha)
{
    const double r = std::abs(alpha);
    if (r * r + 6.0 * r > basis.n_max())
        throw TruncationError("build_displacement_op: |alpha|^2 + 6|alpha| exceeds n_max");
    if (coherent_tail(r, basis.n_max()) > 1e-6)
        throw TruncationError("build_displacement_op: coherent state leaks beyond n_max");
    const auto ops = build_ladder_ops(basis);
    const CMatrix u = expm(alpha * ops.adag.matrix() - std::conj(alpha) * ops.a.matrix());
    check_unitary(u, "build_displacement_op");
    return ComplexOperator(basis, u);
}

PureState EigenSystem::state(int i) const { return PureState(basis, vectors.col(i)); }

namespace {

// Connected components of the sparsity graph; exact block structure.
std::vector<std::vector<int>> components(const CMatrix& m)
{
    const int n = int(m.rows());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i)
            if (m(i, j) != cplx(0.0) || m(j, i) != cplx(0.0)) {
                const int ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
    std::vector<std::vector<int>> out;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (slot[r] < 0) {
            slot[r] = int(out.size());
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

}  // namespace

EigenSystem eig_hermitian_fast(const CMatrix& m, const FockBasis& basis)
{
    const int n = int(m.rows());
    std::vector<double> vals;
    std::vector<CVector> vecs;
    vals.reserve(n);
    vecs.reserve(n);
    const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
    for (const auto& comp : components(m)) {
        const int k = int(comp.size());
        if (real) {
            Eigen::MatrixXd sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = m(comp[i], comp[j]).real();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
            for (int c = 0; c < k; ++c) {
                CVector v = CVector::Zero(n);
                for (int i = 0; i < k; ++i) v(comp[i]) = es.eigenvectors()(i, c);
                vals.push_back(es.eigenvalues()(c));
                vecs.push_back(std::move(v));
            }
        } else {
            CMatrix sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = m(comp[i], comp[j]);
            Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
            for (int c = 0; c < k; ++c) {
                CVector v = CVector::Zero(n);
                for (int i = 0; i < k; ++i) v(comp[i]) = es.eigenvectors()(i, c);
                vals.push_back(es.eigenvalues()(c));
                vecs.push_back(std::move(v));
            }
        }
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return vals[x] < vals[y]; });

    EigenSystem es{basis, Eigen::VectorXd(n), CMatrix(n, n)};
    for (int c = 0; c < n; ++c) {
        CVector v = vecs[order[c]];
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::conj(v(imax)) / std::abs(v(imax));
        v(imax) = std::abs(v(imax));
        es.values(c) = vals[order[c]];
        es.vectors.col(c) = v;
    }
    return es;
}

EigenSystem eig_hermitian(const ComplexOperator& op)
{
    if (!op.is_hermitian()) throw NotHermitian("eig_hermitian: operator is not Hermitian");
    EigenSystem es = eig_hermitian_fast(op.matrix(), op.basis());
    const double scale = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
    const CMatrix r = op.matrix() * es.vectors - es.vectors * es.values.cast<cplx>().asDiagonal();
    for (int c = 0; c < r.cols(); ++c)
        if (r.col(c).norm() > 1e-9 * scale)
            throw NoConvergence("eig_hermitian: residual certificate failed");
    return es;
}

cplx expectation(const ComplexOperator& op, const PureState& psi)
{
    return psi.amp.dot(op.matrix() * psi.amp);
}

cplx expectation(const ComplexOperator& op, const DensityOperator& rho)
{
    return (op.matrix() * rho.rho).trace();
}

namespace {

double parity_sign(const FockBasis& b, int i)
{
    const int n = b.photons(i);
    double s = (n % 2 == 0) ? 1.0 : -1.0;
    if (b.with_spin() && b.spin(i) == 1) s = -s;
    return s;
}

}  // namespace

double parity_expectation(const PureState& psi)
{
    double p = 0.0;
    for (int i = 0; i < psi.basis.dim(); ++i) p += parity_sign(psi.basis, i) * std::norm(psi.amp(i));
    return p;
}

double parity_expectation(const DensityOperator& rho)
{
    double p = 0.0;
    for (int i = 0; i < rho.basis.dim(); ++i) p += parity_sign(rho.basis, i) * rho.rho(i, i).real();
    return p;
}

namespace {

// rho(j, i) accessor: pure states use psi_j conj(psi_i).
template <class Elem>
BosonMoments moments_from(const FockBasis& b, Elem elem)
{
    double n1 = 0.0, n2 = 0.0;
    cplx a1 = 0.0, a2 = 0.0;
    const int nb = b.boson_dim();
    const int ns = b.with_spin() ? 2 : 1;
    for (int n = 0; n < nb; ++n)
        for (int s = 0; s < ns; ++s) {
            const int i = b.index(n, s);
            const double p = elem(i, i).real();
            n1 += n * p;
            n2 += double(n) * n * p;
            // <a> = sum sqrt(n) rho(n, n-1); <a^2> = sum sqrt(n(n-1)) rho(n, n-2)
            if (n >= 1) a1 += std::sqrt(double(n)) * elem(i, b.index(n - 1, s));
            if (n >= 2) a2 += std::sqrt(double(n) * (n - 1)) * elem(i, b.index(n - 2, s));
        }
    BosonMoments m;
    m.mean_n = n1;
    m.var_n = n2 - n1 * n1;
    m.mean_x = std::sqrt(2.0) * a1.real();
    m.mean_p = std::sqrt(2.0) * a1.imag();
    m.var_x = (2.0 * a2.real() + 2.0 * n1 + 1.0) / 2.0 - m.mean_x * m.mean_x;
    m.var_p = (2.0 * n1 + 1.0 - 2.0 * a2.real()) / 2.0 - m.mean_p * m.mean_p;
    m.cov_xp = a2.imag() - m.mean_x * m.mean_p;
    return m;
}

}  // namespace

BosonMoments boson_moments(const PureState& psi)
{
    return moments_from(psi.basis, [&](int j, int i) { return psi.amp(j) * std::conj(psi.amp(i)); });
}

BosonMoments boson_moments(const DensityOperator& rho)
{
    return moments_from(rho.basis, [&](int j, int i) { return rho.rho(j, i); });
}

double state_fidelity(const PureState& a, const PureState& b) { return std::norm(a.amp.dot(b.amp)); }

double state_fidelity(const PureState& a, const DensityOperator& rho)
{
    return a.amp.dot(rho.rho * a.amp).real();
}

double overlap_deficit(const PureState& a, const PureState& b)
{
    const cplx ov = a.amp.dot(b.amp);
    const cplx phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cplx(1.0);
    // |b - phase a|^2 = 2 - 2|<a|b>|
    return 0.5 * (b.amp - phase * a.amp).squaredNorm();
}

}  // namespace critmet
