#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "critmet/models.hpp"

namespace critmet {

// Path shapes. The swept variable s is dimensionless:
//   StraightLine, Parabola, PowerCurve: s = g2/g_c, swept downward to the triple point
//   BoundaryLine: s = g1/g_c, swept upward toward g1 + eta g2 = 0 meeting the boundary
//   JcmLine: s = h/omega_t, swept downward to (g_t, h) = (g_t_c, 0)
struct StraightLine {
    double k;
};
struct Parabola {
    double k;
};
struct PowerCurve {
    double k;
    double beta;
};
struct BoundaryLine {
    double eta;
};
struct JcmLine {
    double k;
    double beta;
};

using PathShape = std::variant<StraightLine, Parabola, PowerCurve, BoundaryLine, JcmLine>;

struct PathSpec {
    PathShape shape;
    double Omega;  // Omega_t for JcmLine
    double omega;  // omega_t for JcmLine

    void validate() const;
    bool is_jcm() const { return std::holds_alternative<JcmLine>(shape); }
    double scale() const;  // g_c, or omega_t for JcmLine
    std::string name() const;
    std::string control() const;
    PathSpec with_omega(double w) const { return {shape, Omega, w}; }
};

// For JcmLine g1 carries g_t and g2 carries h.
struct PathPoint {
    double s;
    double g1;
    double g2;
};

struct SRange {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;
};

SRange admissible_range(const PathSpec& spec);
double default_start(const PathSpec& spec);
double default_end(const PathSpec& spec);
bool sweeps_down(const PathSpec& spec);

PathPoint path_point(const PathSpec& spec, double s);
AqrmParams aqrm_at(const PathSpec& spec, const PathPoint& pt);
JcmParams jcm_at(const PathSpec& spec, const PathPoint& pt);
QuadraticForm quadratic_at(const PathSpec& spec, const PathPoint& pt);

double path_gap(const PathSpec& spec, double s);
double path_gamma(const PathSpec& spec, double s);
double path_dgamma_ds(const PathSpec& spec, double s);
double path_qfi(const PathSpec& spec, double s);
double path_mean_n(const PathSpec& spec, double s);

enum class RampLaw { GapLinear, GapQuadratic, GapCubic, Custom };

struct RampSpec {
    double delta = 1e-3;
    RampLaw law = RampLaw::GapLinear;
    // Custom: v = prefactor * delta * omega * (gap/omega)^exponent
    double exponent = 1.0;
    double prefactor = 1.0;

    void validate() const;
};

std::string to_string(RampLaw law);
RampLaw ramp_law_from_string(const std::string& s);

// |ds/dt| at s, from the exact gap.
double ramp_rate(const PathSpec& spec, const RampSpec& ramp, double s);

struct ScheduleSample {
    double t;
    double s;
    double g1;
    double g2;
    double v;
    double gap;
};

struct ScheduleGrid {
    double max_gap_change = 0.02;
    double tol = 1e-6;
    int max_refinements = 10;
};

class Schedule {
public:
    Schedule(PathSpec spec, RampSpec ramp, std::vector<ScheduleSample> samples, double certificate);

    const PathSpec& spec() const { return spec_; }
    const RampSpec& ramp() const { return ramp_; }
    const std::vector<ScheduleSample>& samples() const { return samples_; }
    double total_time() const { return samples_.empty() ? 0.0 : samples_.back().t; }
    // Relative change of T under 2x quadrature refinement.
    double certificate() const { return certificate_; }
    std::string control() const { return spec_.control(); }

    // Swept variable at time t; `hint` is an interval index to start from.
    double s_at(double t, int hint = -1) const;
    int interval_of(double t) const;
    // Elapsed time between s_a and s_b measured along the sweep.
    double time_between(double s_a, double s_b) const;

private:
    PathSpec spec_;
    RampSpec ramp_;
    std::vector<ScheduleSample> samples_;
    double certificate_;
};

Schedule build_schedule(const PathSpec& spec, const RampSpec& ramp, double s_start, double s_end,
                        const ScheduleGrid& grid = {});

// Dynamics grid: every schedule interval split so that v dt <= 1e-3 and
// gap dt <= 0.1, then multiplied by `refine`; also dt <= dt_max.
struct TimeGrid {
    std::vector<double> t;
    std::vector<int> sample;    // schedule sample index at t[j], or -1
    std::vector<int> interval;  // schedule interval containing step j -> j+1
};

TimeGrid dynamics_grid(const Schedule& schedule, int refine = 1, double dt_max = 0.0);

enum class ScalingClass { ExpSuperHS, Heisenberg, SubHS, QuarticBoundary };
std::string to_string(ScalingClass c);

struct Prediction {
    double T_closed = 0.0;
    double N_final = 0.0;
    double F_final = 0.0;
    double excitation = 0.0;
    ScalingClass scaling = ScalingClass::ExpSuperHS;
    std::map<std::string, double> coefficients;
};

Prediction predict(const PathSpec& spec, const RampSpec& ramp, double s_end);

// QFI asymptote along 1 - g1/g_c = k s^beta (Table I of the reference analysis).
double powerlaw_qfi_asymptote(double k, double beta, double omega, double s);

// Fixed 8-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre8(F f, double a, double b);

}  // namespace critmet

#include "critmet/detail/quadrature.hpp"
