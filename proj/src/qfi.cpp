#include "critmet/qfi.hpp"

#include <cmath>
#include <sstream>

#include "critmet/errors.hpp"

namespace critmet {

QfiEstimate qfi_np_analytic(const AqrmParams& p)
{
    if (classify_phase(p) != PhaseLabel::NP) throw PhaseError("qfi_np_analytic: point is outside the normal phase");
    const double gc = p.gc();
    const double u = (p.g1 + p.g2) / gc, w = (p.g1 - p.g2) / gc;
    const double bracket = 1.0 / (1.0 - u * u) - 1.0 / (1.0 - w * w);
    QfiEstimate q;
    q.value = bracket * bracket / (8.0 * p.omega * p.omega);
    q.method = QfiMethod::Analytic;
    q.parameter = "omega";
    return q;
}

QfiEstimate qfi_jcm_analytic(const JcmParams& p)
{
    p.validate();
    if (!jcm_in_np(p)) throw PhaseError("qfi_jcm_analytic: point is outside the JCM normal phase");
    const double x = p.g_t * p.g_t / (p.gc() * p.gc());
    const double r = p.h / p.omega_t;
    const double ratio = r / ((1.0 - x) * (1.0 - x) - r * r);
    QfiEstimate q;
    q.value = ratio * ratio / (2.0 * p.omega_t * p.omega_t);
    q.method = QfiMethod::Analytic;
    q.parameter = "omega_t";
    return q;
}

QfiEstimate qfi_perturbative(const ComplexOperator& H0, const ComplexOperator& H1)
{
    if (!H0.is_hermitian() || !H1.is_hermitian()) throw NotHermitian("qfi_perturbative: non-Hermitian input");
    const EigenSystem es = eig_hermitian(H0);
    const int n = int(es.values.size());
    const double scale = es.values.cwiseAbs().maxCoeff();
    if (es.values(1) - es.values(0) < 1e-10 * scale)
        throw DegenerateGround("qfi_perturbative: ground state is degenerate");
    const CVector m = es.vectors.adjoint() * (H1.matrix() * es.vectors.col(0));
    const int top = n - std::max(1, n / 10);
    double total = 0.0, tail = 0.0;
    for (int k = 1; k < n; ++k) {
        const double d = es.values(k) - es.values(0);
        const double term = 4.0 * std::norm(m(k)) / (d * d);
        total += term;
        if (k >= top) tail += term;
    }
    QfiEstimate q;
    q.value = total;
    q.method = QfiMethod::Perturbative;
    q.parameter = "lambda";
    q.top_decile_share = total > 0.0 ? tail / total : 0.0;
    q.flagged = q.top_decile_share > 1e-6;
    return q;
}

QfiEstimate qfi_fidelity(const std::function<double(double, double)>& deficit, double lambda, double dlambda,
                         double floor)
{
    if (!(dlambda > 0.0)) throw RangeError("qfi_fidelity: step must be positive");
    if (floor <= 0.0) floor = 1e-4 * dlambda;
    auto estimate = [&](double h) { return 8.0 * deficit(lambda - 0.5 * h, lambda + 0.5 * h) / (h * h); };
    double h = dlambda;
    double prev = estimate(h);
    for (;;) {
        const double next_h = 0.5 * h;
        if (next_h < floor) {
            std::ostringstream os;
            os.precision(10);
            os << "qfi_fidelity: Richardson halving did not converge (estimates " << prev << " at step " << h
               << ")";
            throw NoConvergence(os.str());
        }
        const double cur = estimate(next_h);
        if (std::abs(cur - prev) <= 1e-4 * std::abs(cur) || (cur == 0.0 && prev == 0.0)) {
            QfiEstimate q;
            q.value = std::max(cur, 0.0);
            q.method = QfiMethod::Fidelity;
            q.parameter = "lambda";
            q.step_used = next_h;
            return q;
        }
        prev = cur;
        h = next_h;
    }
}

QfiEstimate qfi_fidelity(const std::function<PureState(double)>& state_at, double lambda, double dlambda,
                         double floor)
{
    return qfi_fidelity([&](double a, double b) { return overlap_deficit(state_at(a), state_at(b)); }, lambda,
                        dlambda, floor);
}

SnrEstimate snr_from_moments(double mean_n, double var_n, double n_minus, double n_plus, double domega)
{
    if (var_n < 1e-14) throw ZeroVariance("snr_photon_number: photon-number variance vanishes");
    const double d = (n_plus - n_minus) / domega;
    return {d * d / var_n, mean_n, var_n, d};
}

SnrEstimate snr_photon_number(const PureState& nominal, const PureState& minus, const PureState& plus,
                              double domega)
{
    const BosonMoments m = boson_moments(nominal);
    return snr_from_moments(m.mean_n, m.var_n, boson_moments(minus).mean_n, boson_moments(plus).mean_n, domega);
}

SnrEstimate snr_photon_number(const DensityOperator& nominal, const DensityOperator& minus,
                              const DensityOperator& plus, double domega)
{
    const BosonMoments m = boson_moments(nominal);
    return snr_from_moments(m.mean_n, m.var_n, boson_moments(minus).mean_n, boson_moments(plus).mean_n, domega);
}

double squeezed_vacuum_deficit(double gamma_a, double gamma_b)
{
    const double d = gamma_a - gamma_b;
    const double cm1 = 2.0 * std::pow(std::sinh(0.5 * d), 2);  // cosh d - 1
    const double s = std::sqrt(1.0 + cm1);
    return cm1 / (s * (s + 1.0));
}

}  // namespace critmet
