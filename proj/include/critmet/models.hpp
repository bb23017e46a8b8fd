#pragma once

#include <optional>
#include <string>

#include "critmet/fockspace.hpp"

namespace critmet {

struct AqrmParams {
    double Omega = 1.0;
    double omega = 1.0;
    double g1 = 0.0;
    double g2 = 0.0;

    double gc() const;
    void validate() const;
    AqrmParams with_omega(double w) const { return {Omega, w, g1, g2}; }
    AqrmParams with_couplings(double a, double b) const { return {Omega, omega, a, b}; }

    // Couplings given in units of g_c.
    static AqrmParams scaled(double Omega, double omega, double g1_over_gc, double g2_over_gc);
};

struct NpSolution {
    double gamma;
    double gap;
    double E0;
    double N;
    double dx;
    double dp;
};

enum class SpBranch { XType, PType };

struct SpSolution {
    SpBranch branch;
    cplx alpha;
    double gamma_p;  // squeezing in the displaced frame
    double gap_p;
    double Omega_p;
    double g1_p;
    double g2_p;
    double gc_p;

    double mean_x() const { return std::sqrt(2.0) * alpha.real(); }
    double mean_p() const { return std::sqrt(2.0) * alpha.imag(); }
    double mean_n() const { return std::norm(alpha) + 0.5 * (std::cosh(2.0 * gamma_p) - 1.0); }
};

// Ground energies of the two SP branches where each exists.
struct SpBranchEnergies {
    std::optional<double> x_type;
    std::optional<double> p_type;
};

struct JcmParams {
    double Omega_t = 1.0;
    double omega_t = 1.0;
    double g_t = 0.0;
    double h = 0.0;

    double gc() const;
    void validate() const;
    JcmParams with_omega(double w) const { return {Omega_t, w, g_t, h}; }
};

struct JcmNpSolution {
    double gamma;
    double gap;
};

enum class PhaseLabel { NP, SP_x, SP_p, Boundary, TriplePoint };

std::string to_string(PhaseLabel p);
std::string to_string(SpBranch b);

// Quadratic bosonic form H = A a^dag a + C (a^2 + a^dag^2), constants dropped.
struct QuadraticForm {
    double A;
    double C;

    double gamma() const;
    double gap() const;
};

QuadraticForm np_quadratic(const AqrmParams& p);
QuadraticForm jcm_quadratic(const JcmParams& p);

ComplexOperator build_full_aqrm(const AqrmParams& p, const FockBasis& basis);
ComplexOperator build_np_hamiltonian(const AqrmParams& p, const FockBasis& basis);
ComplexOperator build_quadratic(const QuadraticForm& q, const FockBasis& basis);

PhaseLabel classify_phase(const AqrmParams& p);
NpSolution np_solution(const AqrmParams& p);
SpSolution sp_solution(const AqrmParams& p);
SpBranchEnergies sp_branch_energies(const AqrmParams& p);

// Exact partial derivatives of gamma with respect to g1 and g2 (absolute units).
struct GammaGradient {
    double d_g1;
    double d_g2;
};
GammaGradient np_gamma_gradient(const AqrmParams& p);
// d gamma / d omega with g_c = 2 sqrt(Omega omega) following omega.
double np_gamma_domega(const AqrmParams& p);

ComplexOperator build_jcm_np_hamiltonian(const JcmParams& p, const FockBasis& basis);
JcmNpSolution jcm_np_solution(const JcmParams& p);
bool jcm_in_np(const JcmParams& p);
double jcm_gamma_domega(const JcmParams& p);

}  // namespace critmet
