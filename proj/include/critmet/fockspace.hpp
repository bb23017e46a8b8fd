#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace critmet {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Truncated Fock space, optionally tensored with a two-level system.
// With spin the index of |n, s> is 2n + s, s = 1 meaning spin up.
class FockBasis {
public:
    explicit FockBasis(int n_max, bool with_spin = false);

    int n_max() const { return n_max_; }
    bool with_spin() const { return with_spin_; }
    int boson_dim() const { return n_max_ + 1; }
    int dim() const { return (n_max_ + 1) * (with_spin_ ? 2 : 1); }
    int index(int n, int spin = 0) const { return with_spin_ ? 2 * n + spin : n; }
    int photons(int i) const { return with_spin_ ? i / 2 : i; }
    int spin(int i) const { return with_spin_ ? i % 2 : 0; }

    bool operator==(const FockBasis& o) const
    {
        return n_max_ == o.n_max_ && with_spin_ == o.with_spin_;
    }

private:
    int n_max_;
    bool with_spin_;
};

class ComplexOperator {
public:
    ComplexOperator(const FockBasis& basis, CMatrix m);

    const FockBasis& basis() const { return basis_; }
    const CMatrix& matrix() const { return m_; }
    bool is_hermitian() const { return hermitian_; }
    double max_abs() const;

private:
    FockBasis basis_;
    CMatrix m_;
    bool hermitian_;
};

bool hermitian_within(const CMatrix& m, double rel_tol = 1e-12);

struct PureState {
    FockBasis basis;
    CVector amp;
    double norm_leakage = 0.0;

    // Normalizes; throws NumericalError for a null vector.
    PureState(const FockBasis& b, CVector v, double leakage = 0.0);

    double norm_deviation() const { return std::abs(amp.norm() - 1.0); }
};

struct DensityOperator {
    FockBasis basis;
    CMatrix rho;

    DensityOperator(const FockBasis& b, CMatrix r);
    static DensityOperator from_pure(const PureState& psi);

    double trace_deviation() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
};

PureState fock_state(const FockBasis& basis, int n, int spin = 0);

struct LadderOps {
    ComplexOperator a;
    ComplexOperator adag;
    ComplexOperator n;
};

struct SpinOps {
    ComplexOperator sz;
    ComplexOperator sp;
    ComplexOperator sm;
};

// Bosonic operators, embedded as op (x) 1 when the basis carries a spin.
LadderOps build_ladder_ops(const FockBasis& basis);
SpinOps build_spin_ops(const FockBasis& basis);

// Smallest Fock cutoff trusted for squeezing gamma: ceil(12 e^{2|gamma|}).
int n_min_for_squeezing(double gamma);
// Weight of the squeezed vacuum above n_max, from the closed-form distribution.
double squeezed_vacuum_tail(double gamma, int n_max);
double coherent_tail(double abs_alpha, int n_max);

ComplexOperator build_squeeze_op(const FockBasis& basis, double gamma);
ComplexOperator build_displacement_op(const FockBasis& basis, cplx alpha);

// Dense matrix exponential by Pade scaling and squaring; real input stays real.
CMatrix expm(const CMatrix& m);

struct EigenSystem {
    FockBasis basis;
    Eigen::VectorXd values;
    CMatrix vectors;  // columns, ascending eigenvalue

    PureState state(int i) const;
};

EigenSystem eig_hermitian(const ComplexOperator& op);
// Same decomposition without the residual certificate, for hot loops.
EigenSystem eig_hermitian_fast(const CMatrix& m, const FockBasis& basis);

cplx expectation(const ComplexOperator& op, const PureState& psi);
cplx expectation(const ComplexOperator& op, const DensityOperator& rho);

// Bosonic parity exp(i pi a^dag a) without spin; with spin the full
// exp(i pi (a^dag a + sz/2)) times the phase i, so |n, down> -> (-1)^n.
double parity_expectation(const PureState& psi);
double parity_expectation(const DensityOperator& rho);

// Photon-number moments and quadratures x = (a + a^dag)/sqrt2, p = i(a^dag - a)/sqrt2.
struct BosonMoments {
    double mean_n = 0.0;
    double var_n = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double cov_xp = 0.0;  // symmetrized
};

BosonMoments boson_moments(const PureState& psi);
BosonMoments boson_moments(const DensityOperator& rho);

double state_fidelity(const PureState& a, const PureState& b);
double state_fidelity(const PureState& a, const DensityOperator& rho);
// 1 - |<a|b>| computed from the phase-aligned difference, accurate when tiny.
double overlap_deficit(const PureState& a, const PureState& b);

}  // namespace critmet
