#include "critmet/models.hpp"

#include <cmath>

#include "critmet/errors.hpp"

namespace critmet {

namespace {
constexpr double kPhaseTol = 1e-9;
}

double AqrmParams::gc() const { return 2.0 * std::sqrt(Omega * omega); }

void AqrmParams::validate() const
{
    if (!(Omega > 0.0) || !(omega > 0.0)) throw RangeError("AqrmParams: Omega and omega must be positive");
    if (!std::isfinite(g1) || !std::isfinite(g2)) throw RangeError("AqrmParams: non-finite coupling");
}

AqrmParams AqrmParams::scaled(double Omega, double omega, double g1_over_gc, double g2_over_gc)
{
    AqrmParams p{Omega, omega, 0.0, 0.0};
    const double gc = p.gc();
    p.g1 = g1_over_gc * gc;
    p.g2 = g2_over_gc * gc;
    return p;
}

double JcmParams::gc() const { return 2.0 * std::sqrt(Omega_t * omega_t); }

void JcmParams::validate() const
{
    if (!(Omega_t > 0.0) || !(omega_t > 0.0)) throw RangeError("JcmParams: frequencies must be positive");
    if (g_t < 0.0) throw RangeError("JcmParams: coupling must be non-negative");
    if (std::abs(h) > omega_t) throw RangeError("JcmParams: |h| must not exceed omega_t");
}

std::string to_string(PhaseLabel p)
{
    switch (p) {
    case PhaseLabel::NP: return "NP";
    case PhaseLabel::SP_x: return "SP_x";
    case PhaseLabel::SP_p: return "SP_p";
    case PhaseLabel::Boundary: return "Boundary";
    case PhaseLabel::TriplePoint: return "TriplePoint";
    }
    return "?";
}

std::string to_string(SpBranch b) { return b == SpBranch::XType ? "x-type" : "p-type"; }

double QuadraticForm::gamma() const { return 0.25 * std::log((A + 2.0 * C) / (A - 2.0 * C)); }

double QuadraticForm::gap() const
{
    const double d = A * A - 4.0 * C * C;
    return d > 0.0 ? std::sqrt(d) : 0.0;
}

QuadraticForm np_quadratic(const AqrmParams& p)
{
    const double gc2 = p.gc() * p.gc();
    return {p.omega * (1.0 - (p.g1 * p.g1 + p.g2 * p.g2) / gc2), -p.omega * p.g1 * p.g2 / gc2};
}

QuadraticForm jcm_quadratic(const JcmParams& p)
{
    const double x = p.g_t * p.g_t / (p.gc() * p.gc());
    return {p.omega_t * (1.0 - x), 0.5 * p.h};
}

ComplexOperator build_quadratic(const QuadraticForm& q, const FockBasis& basis)
{
    if (basis.with_spin()) throw RangeError("quadratic bosonic Hamiltonian needs a bosonic basis");
    const auto ops = build_ladder_ops(basis);
    const CMatrix& a = ops.a.matrix();
    const CMatrix& ad = ops.adag.matrix();
    return ComplexOperator(basis, q.A * ops.n.matrix() + q.C * (a * a + ad * ad));
}

ComplexOperator build_full_aqrm(const AqrmParams& p, const FockBasis& basis)
{
    if (!basis.with_spin()) throw RangeError("build_full_aqrm: spin basis required");
    p.validate();
    const auto b = build_ladder_ops(basis);
    const auto s = build_spin_ops(basis);
    const CMatrix& a = b.a.matrix();
    const CMatrix& ad = b.adag.matrix();
    const CMatrix& sp = s.sp.matrix();
    const CMatrix& sm = s.sm.matrix();
    CMatrix h = 0.5 * p.Omega * s.sz.matrix() + p.omega * b.n.matrix() +
                0.5 * p.g1 * (ad * sm + a * sp) + 0.5 * p.g2 * (ad * sp + a * sm);
    return ComplexOperator(basis, h);
}

PhaseLabel classify_phase(const AqrmParams& p)
{
    p.validate();
    const double gc = p.gc();
    const double a1 = std::abs(p.g1) / gc, a2 = std::abs(p.g2) / gc;
    const double u = std::abs(p.g1 + p.g2) / gc, w = std::abs(p.g1 - p.g2) / gc;
    const bool triple = (std::abs(a1 - 1.0) <= kPhaseTol && a2 <= kPhaseTol) ||
                        (std::abs(a2 - 1.0) <= kPhaseTol && a1 <= kPhaseTol);
    if (triple) return PhaseLabel::TriplePoint;
    if (u < 1.0 - kPhaseTol && w < 1.0 - kPhaseTol) return PhaseLabel::NP;
    if (std::abs(u - 1.0) <= kPhaseTol || std::abs(w - 1.0) <= kPhaseTol) return PhaseLabel::Boundary;
    if (a1 <= kPhaseTol || a2 <= kPhaseTol)
        throw AmbiguousRegion("classify_phase: point lies on the SP_x/SP_p line (g1 g2 = 0)");
    if (p.g1 * p.g2 > 0.0 && u > 1.0) return PhaseLabel::SP_x;
    if (p.g1 * p.g2 < 0.0 && w > 1.0) return PhaseLabel::SP_p;
    throw AmbiguousRegion("classify_phase: unclassifiable point");
}

namespace {

void require_np(const AqrmParams& p, const char* who)
{
    if (classify_phase(p) != PhaseLabel::NP) throw PhaseError(std::string(who) + ": point is outside the normal phase");
}

}  // namespace

NpSolution np_solution(const AqrmParams& p)
{
    require_np(p, "np_solution");
    const double gc = p.gc();
    const double u = (p.g1 + p.g2) / gc, w = (p.g1 - p.g2) / gc;
    NpSolution s;
    s.gamma = 0.25 * std::log((1.0 - u * u) / (1.0 - w * w));
    s.gap = p.omega * std::sqrt((1.0 - w * w) * (1.0 - u * u));
    s.E0 = -0.5 * (p.Omega + p.omega) + 0.5 * p.omega * (p.g1 * p.g1 - p.g2 * p.g2) / (gc * gc) + 0.5 * s.gap;
    s.N = 0.5 * (std::cosh(2.0 * s.gamma) - 1.0);
    s.dx = std::exp(-s.gamma) / std::sqrt(2.0);
    s.dp = std::exp(s.gamma) / std::sqrt(2.0);
    return s;
}

ComplexOperator build_np_hamiltonian(const AqrmParams& p, const FockBasis& basis)
{
    require_np(p, "build_np_hamiltonian");
    return build_quadratic(np_quadratic(p), basis);
}

GammaGradient np_gamma_gradient(const AqrmParams& p)
{
    const double gc2 = p.gc() * p.gc();
    const double u = p.g1 + p.g2, w = p.g1 - p.g2;
    const double du = -2.0 * u / (gc2 - u * u);  // d/du ln(gc^2 - u^2)
    const double dw = -2.0 * w / (gc2 - w * w);
    return {0.25 * (du - dw), 0.25 * (du + dw)};
}

double np_gamma_domega(const AqrmParams& p)
{
    // gamma = 1/4 [ln(4 Omega omega - u^2) - ln(4 Omega omega - w^2)]
    const double gc2 = p.gc() * p.gc();
    const double u = p.g1 + p.g2, w = p.g1 - p.g2;
    return 0.25 * 4.0 * p.Omega * (1.0 / (gc2 - u * u) - 1.0 / (gc2 - w * w));
}

SpBranchEnergies sp_branch_energies(const AqrmParams& p)
{
    p.validate();
    const double gc = p.gc();
    SpBranchEnergies e;
    auto energy = [&](double s, double d) {
        // s: the sum selecting the branch, d: the complementary combination
        const double r = s / gc;
        const double gap = p.omega * std::sqrt(std::max(0.0, (1.0 - std::pow(d / s, 2)) * (1.0 - std::pow(gc / s, 4))));
        return -0.25 * p.Omega * (r * r + 1.0 / (r * r)) - 0.5 * p.omega +
               0.5 * p.omega * (d / s) * std::pow(gc / s, 2) + 0.5 * gap;
    };
    const double u = p.g1 + p.g2, w = p.g1 - p.g2;
    if (std::abs(u) > gc && std::abs(w) <= std::abs(u)) e.x_type = energy(u, w);
    if (std::abs(w) > gc && std::abs(u) <= std::abs(w)) e.p_type = energy(w, u);
    return e;
}

SpSolution sp_solution(const AqrmParams& p)
{
    PhaseLabel label = classify_phase(p);
    if (label != PhaseLabel::SP_x && label != PhaseLabel::SP_p)
        throw PhaseError("sp_solution: point is not in a superradiant phase");
    const double gc = p.gc();
    const double u = p.g1 + p.g2, w = p.g1 - p.g2;
    SpSolution s;
    if (label == PhaseLabel::SP_x) {
        s.branch = SpBranch::XType;
        s.alpha = p.Omega / std::abs(u) * std::sqrt(std::pow(u / gc, 4) - 1.0);
        s.Omega_p = p.Omega * std::pow(u / gc, 2);
        s.g1_p = -0.5 * (w + gc * gc / u);
        s.g2_p = 0.5 * (w - gc * gc / u);
        const double a = 1.0 - std::pow(gc / u, 4), b = 1.0 - std::pow(w / u, 2);
        s.gamma_p = 0.25 * std::log(a / b);
        s.gap_p = p.omega * std::sqrt(a * b);
    } else {
        s.branch = SpBranch::PType;
        s.alpha = cplx(0.0, p.Omega / std::abs(w) * std::sqrt(std::pow(w / gc, 4) - 1.0));
        s.Omega_p = p.Omega * std::pow(w / gc, 2);
        s.g1_p = -0.5 * (u + gc * gc / w);
        s.g2_p = -0.5 * (u - gc * gc / w);
        const double a = 1.0 - std::pow(gc / w, 4), b = 1.0 - std::pow(u / w, 2);
        s.gamma_p = 0.25 * std::log(b / a);
        s.gap_p = p.omega * std::sqrt(a * b);
    }
    s.gc_p = 2.0 * std::sqrt(s.Omega_p * p.omega);
    return s;
}

bool jcm_in_np(const JcmParams& p)
{
    const double x = p.g_t * p.g_t / (p.gc() * p.gc());
    return std::abs(p.h / p.omega_t) < (1.0 - x) * (1.0 - kPhaseTol);
}

JcmNpSolution jcm_np_solution(const JcmParams& p)
{
    p.validate();
    if (!jcm_in_np(p)) throw PhaseError("jcm_np_solution: point is outside the JCM normal phase");
    const double x = p.g_t * p.g_t / (p.gc() * p.gc());
    const double r = p.h / p.omega_t;
    return {0.25 * std::log((1.0 - x + r) / (1.0 - x - r)),
            p.omega_t * std::sqrt((1.0 - x) * (1.0 - x) - r * r)};
}

ComplexOperator build_jcm_np_hamiltonian(const JcmParams& p, const FockBasis& basis)
{
    p.validate();
    if (!jcm_in_np(p)) throw PhaseError("build_jcm_np_hamiltonian: point is outside the JCM normal phase");
    return build_quadratic(jcm_quadratic(p), basis);
}

double jcm_gamma_domega(const JcmParams& p)
{
    // x = g^2 / (4 Omega omega) and h/omega both depend on omega.
    const double gc2 = p.gc() * p.gc();
    const double x = p.g_t * p.g_t / gc2;
    const double r = p.h / p.omega_t;
    const double dx = -x / p.omega_t, dr = -r / p.omega_t;
    const double plus = 1.0 - x + r, minus = 1.0 - x - r;
    return 0.25 * ((-dx + dr) / plus - (-dx - dr) / minus);
}

}  // namespace critmet
