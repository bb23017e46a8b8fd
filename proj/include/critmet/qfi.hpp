#pragma once

#include <functional>
#include <string>

#include "critmet/fockspace.hpp"
#include "critmet/models.hpp"

namespace critmet {

enum class QfiMethod { Analytic, Perturbative, Fidelity };

struct QfiEstimate {
    double value = 0.0;
    QfiMethod method = QfiMethod::Analytic;
    std::string parameter = "omega";
    double step_used = 0.0;
    // Perturbative only: share of the sum carried by the top decile of states.
    double top_decile_share = 0.0;
    bool flagged = false;
};

struct SnrEstimate {
    double value;
    double mean_n;
    double var_n;
    double dn_domega;
};

QfiEstimate qfi_np_analytic(const AqrmParams& p);
QfiEstimate qfi_jcm_analytic(const JcmParams& p);

// F = 4 sum_{n>0} |<n|H1|0>|^2 / (E_n - E_0)^2 over all retained states.
QfiEstimate qfi_perturbative(const ComplexOperator& H0, const ComplexOperator& H1);

// Central-difference fidelity estimator with Richardson step halving.
// `deficit(a, b)` must return 1 - |<psi(a)|psi(b)>|.
QfiEstimate qfi_fidelity(const std::function<double(double, double)>& deficit, double lambda, double dlambda,
                         double floor = 0.0);
QfiEstimate qfi_fidelity(const std::function<PureState(double)>& state_at, double lambda, double dlambda,
                         double floor = 0.0);

// Photon-number SNR from a nominal state and a pair at omega -/+ domega/2.
SnrEstimate snr_photon_number(const PureState& nominal, const PureState& minus, const PureState& plus,
                              double domega);
SnrEstimate snr_photon_number(const DensityOperator& nominal, const DensityOperator& minus,
                              const DensityOperator& plus, double domega);
SnrEstimate snr_from_moments(double mean_n, double var_n, double n_minus, double n_plus, double domega);

// Squeezed-vacuum overlap deficit 1 - 1/sqrt(cosh(g1 - g2)), exact for real squeezing.
double squeezed_vacuum_deficit(double gamma_a, double gamma_b);

}  // namespace critmet
