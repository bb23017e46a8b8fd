#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "critmet/fockspace.hpp"
#include "critmet/models.hpp"
#include "critmet/schedules.hpp"

namespace critmet {

// Point -> operator builder with exposed affine structure
// H(point) = sum_j coefficients(point)[j] * terms[j].
struct HamiltonianModel {
    FockBasis basis;
    std::vector<CMatrix> terms;
    std::function<std::vector<double>(const PathPoint&)> coefficients;
    double frequency_ratio = 0.0;  // Omega/omega for spin models, 0 otherwise

    CMatrix build(const PathPoint& pt) const;
    ComplexOperator operator()(const PathPoint& pt) const { return ComplexOperator(basis, build(pt)); }
};

// Effective bosonic H_np (aQRM) or H~_np (JCM) along the path's model.
HamiltonianModel np_model(const PathSpec& spec, const FockBasis& basis);
// Full spin-boson aQRM with field frequency `omega`; the schedule fixes g1, g2.
HamiltonianModel full_aqrm_model(double Omega, double omega, const FockBasis& basis);

struct GaussianState {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();  // (<x>, <p>)
    Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();

    static GaussianState squeezed_vacuum(double gamma);
    double mean_n() const;
    double var_n() const;
    double purity_det() const { return cov.determinant(); }
    double parity() const;
    double fidelity(const GaussianState& o) const;
};

struct SampleObservables {
    double t = 0.0;
    double s = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double mean_n = 0.0;
    double var_n = 0.0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double cov_xp = 0.0;
    double fid_gs = 0.0;
    double c2_sq = 0.0;
    double sigma_z = std::numeric_limits<double>::quiet_NaN();
    double parity = 0.0;
};

struct Trajectory {
    std::vector<SampleObservables> samples;
    std::vector<PureState> states;
    std::vector<DensityOperator> rhos;
    std::vector<GaussianState> gaussians;
    std::optional<PureState> final_state;
    std::optional<DensityOperator> final_rho;
    std::optional<GaussianState> final_gaussian;

    int steps = 0;
    double max_norm_deviation = 0.0;
    double max_trace_deviation = 0.0;
    double max_hermiticity_error = 0.0;
    double max_leakage = 0.0;
    double min_eigenvalue = 0.0;
    double max_purity_error = 0.0;
    int positivity_retries = 0;
    bool kappa_a_ignored = false;
    // Richardson ratio |x_h - x_{h/2}| / |x_{h/2} - x_{h/4}|; NaN when not certified.
    double order_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct EvolveOptions {
    int refine = 1;
    double dt_max = 0.0;
    bool keep_states = false;
    bool certify_order = false;
    bool instantaneous_observables = true;
    // Gaussian engine: field frequency of the Hamiltonian when it differs from
    // the schedule's (detuned copies for QFI and SNR follow the nominal controls).
    std::optional<double> hamiltonian_omega;
};

Trajectory schrodinger_evolve(const HamiltonianModel& model, const Schedule& schedule, const PureState& psi0,
                              const EvolveOptions& opt = {});

// Exact quadratic dynamics of H_np(t) from the NP ground state at the schedule start.
Trajectory gaussian_evolve(const Schedule& schedule, const EvolveOptions& opt = {});
// Same propagation from an arbitrary initial Gaussian state.
Trajectory gaussian_evolve(const Schedule& schedule, const GaussianState& initial, const EvolveOptions& opt = {});
// One exact step of H = A a^dag a + C(a^2 + a^dag^2) for time dt.
GaussianState gaussian_step(const GaussianState& g, const QuadraticForm& q, double dt);

struct ExcitationRecord {
    double t;
    double s;
    std::complex<double> c2;
    double theta;  // accumulated phase 2 int gap dt
    double F;      // -d gamma / d(control), in inverse units of the control
};

struct ExcitationSeries {
    std::vector<ExcitationRecord> records;
    int refinements = 0;  // intervals split because the phase advance exceeded pi
};

ExcitationSeries excitation_amplitude(const Schedule& schedule);

// c_n = <n| Gamma(gamma)^dag |psi>, n = 0..n_keep.
std::vector<std::complex<double>> instantaneous_decompose(const PureState& psi, double gamma, int n_keep = 6);
std::vector<std::complex<double>> instantaneous_decompose(const PureState& psi, const AqrmParams& p,
                                                          int n_keep = 6);

enum class LindbladMode { FullModel, BosonicOnly };

struct LindbladConfig {
    double kappa_p = 0.0;
    double kappa_a = 0.0;
    LindbladMode mode = LindbladMode::BosonicOnly;
    // RK4 step cap; 0 picks 2/(spectral spread of H), inside the RK4 stability region.
    double dt_max = 0.0;
    // Positivity is checked at every schedule sample.
    int max_retries = 4;
};

Trajectory lindblad_evolve(const HamiltonianModel& model, const Schedule& schedule, const LindbladConfig& config,
                           const DensityOperator& rho0, const EvolveOptions& opt = {});

// Frozen-Hamiltonian Lindblad propagation over a uniform grid (tests and presets).
// Collapse operators carry their rates: pass sqrt(kappa) O.
DensityOperator lindblad_propagate_static(const CMatrix& H, const std::vector<CMatrix>& collapse,
                                          const DensityOperator& rho0, double t, int steps);

double trace_distance(const DensityOperator& a, const DensityOperator& b);

}  // namespace critmet
