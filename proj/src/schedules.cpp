#include "critmet/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "critmet/errors.hpp"
#include "critmet/qfi.hpp"

namespace critmet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void PathSpec::validate() const
{
    if (!(Omega > 0.0) || !(omega > 0.0)) throw RangeError("PathSpec: frequencies must be positive");
    std::visit(overloaded{
                   [](const StraightLine& p) {
                       if (!(p.k > 1.0)) throw RangeError("StraightLine: k must exceed 1");
                   },
                   [](const Parabola& p) {
                       if (!(p.k > 1.0)) throw RangeError("Parabola: k must exceed 1");
                   },
                   [](const PowerCurve& p) {
                       if (!(p.k > 1.0)) throw RangeError("PowerCurve: k must exceed 1");
                       if (!(p.beta > 0.0 && p.beta < 1.0))
                           throw PhaseError("PowerCurve: beta must lie in (0, 1)");
                   },
                   [](const BoundaryLine& p) {
                       if (!(p.eta < 0.0)) throw RangeError("BoundaryLine: eta must be negative");
                   },
                   [](const JcmLine& p) {
                       if (!(p.k > 1.0)) throw RangeError("JcmLine: k must exceed 1");
                       if (!(p.beta > 0.5 && p.beta <= 1.0)) throw RangeError("JcmLine: beta must lie in (1/2, 1]");
                   },
               },
               shape);
}

double PathSpec::scale() const { return is_jcm() ? omega : 2.0 * std::sqrt(Omega * omega); }

std::string PathSpec::name() const
{
    return std::visit(overloaded{
                          [](const StraightLine&) { return std::string("StraightLine"); },
                          [](const Parabola&) { return std::string("Parabola"); },
                          [](const PowerCurve&) { return std::string("PowerCurve"); },
                          [](const BoundaryLine&) { return std::string("BoundaryLine"); },
                          [](const JcmLine&) { return std::string("JcmLine"); },
                      },
                      shape);
}

std::string PathSpec::control() const
{
    if (is_jcm()) return "h";
    return std::holds_alternative<BoundaryLine>(shape) ? "g1" : "g2";
}

bool sweeps_down(const PathSpec& spec) { return !std::holds_alternative<BoundaryLine>(spec.shape); }

SRange admissible_range(const PathSpec& spec)
{
    spec.validate();
    return std::visit(overloaded{
                          [](const StraightLine& p) { return SRange{0.0, 1.0 / p.k, true, false}; },
                          [](const Parabola& p) { return SRange{0.0, 1.0 / p.k, true, false}; },
                          [](const PowerCurve& p) { return SRange{0.0, std::pow(p.k, -1.0 / p.beta), true, false}; },
                          [](const BoundaryLine& p) { return SRange{0.0, 1.0 / (1.0 - 1.0 / p.eta), false, true}; },
                          [](const JcmLine& p) { return SRange{0.0, std::pow(p.k, -1.0 / p.beta), true, false}; },
                      },
                      spec.shape);
}

double default_start(const PathSpec& spec)
{
    const SRange r = admissible_range(spec);
    return sweeps_down(spec) ? r.hi : r.lo;
}

double default_end(const PathSpec& spec)
{
    const SRange r = admissible_range(spec);
    if (std::holds_alternative<BoundaryLine>(spec.shape)) return 0.999 * r.hi;
    return 1e-3;
}

PathPoint path_point(const PathSpec& spec, double s)
{
    const SRange r = admissible_range(spec);
    const bool below = r.lo_open ? s <= r.lo : s < r.lo;
    const bool above = r.hi_open ? s >= r.hi : s > r.hi * (1.0 + 1e-14);
    if (below || above || !std::isfinite(s)) throw RangeError("path_point: swept value outside the admissible range");
    const double gc = spec.scale();
    PathPoint pt{s, 0.0, 0.0};
    std::visit(overloaded{
                   [&](const StraightLine& p) {
                       pt.g1 = gc * (1.0 - p.k * s);
                       pt.g2 = gc * s;
                   },
                   [&](const Parabola& p) {
                       pt.g1 = gc * (1.0 - p.k * s) * (1.0 - p.k * s);
                       pt.g2 = gc * s;
                   },
                   [&](const PowerCurve& p) {
                       pt.g1 = gc * (1.0 - p.k * std::pow(s, p.beta));
                       pt.g2 = gc * s;
                   },
                   [&](const BoundaryLine& p) {
                       pt.g1 = gc * s;
                       pt.g2 = -pt.g1 / p.eta;
                   },
                   [&](const JcmLine& p) {
                       const JcmParams base{spec.Omega, spec.omega, 0.0, 0.0};
                       const double x = std::max(0.0, 1.0 - p.k * std::pow(s, p.beta));
                       pt.g1 = base.gc() * std::sqrt(x);
                       pt.g2 = spec.omega * s;
                   },
               },
               spec.shape);
    if (spec.is_jcm()) {
        if (!jcm_in_np(jcm_at(spec, pt))) throw PhaseError("path_point: point leaves the JCM normal phase");
    } else if (classify_phase(aqrm_at(spec, pt)) != PhaseLabel::NP) {
        throw PhaseError("path_point: point leaves the normal phase");
    }
    return pt;
}

AqrmParams aqrm_at(const PathSpec& spec, const PathPoint& pt)
{
    if (spec.is_jcm()) throw RangeError("aqrm_at: JCM path");
    return {spec.Omega, spec.omega, pt.g1, pt.g2};
}

JcmParams jcm_at(const PathSpec& spec, const PathPoint& pt)
{
    if (!spec.is_jcm()) throw RangeError("jcm_at: not a JCM path");
    return {spec.Omega, spec.omega, pt.g1, pt.g2};
}

QuadraticForm quadratic_at(const PathSpec& spec, const PathPoint& pt)
{
    return spec.is_jcm() ? jcm_quadratic(jcm_at(spec, pt)) : np_quadratic(aqrm_at(spec, pt));
}

double path_gap(const PathSpec& spec, double s)
{
    const PathPoint pt = path_point(spec, s);
    return spec.is_jcm() ? jcm_np_solution(jcm_at(spec, pt)).gap : np_solution(aqrm_at(spec, pt)).gap;
}

double path_gamma(const PathSpec& spec, double s)
{
    const PathPoint pt = path_point(spec, s);
    return spec.is_jcm() ? jcm_np_solution(jcm_at(spec, pt)).gamma : np_solution(aqrm_at(spec, pt)).gamma;
}

double path_mean_n(const PathSpec& spec, double s)
{
    return 0.5 * (std::cosh(2.0 * path_gamma(spec, s)) - 1.0);
}

double path_qfi(const PathSpec& spec, double s)
{
    const PathPoint pt = path_point(spec, s);
    return spec.is_jcm() ? qfi_jcm_analytic(jcm_at(spec, pt)).value : qfi_np_analytic(aqrm_at(spec, pt)).value;
}

double path_dgamma_ds(const PathSpec& spec, double s)
{
    const PathPoint pt = path_point(spec, s);
    if (const auto* j = std::get_if<JcmLine>(&spec.shape)) {
        const double m = j->k * std::pow(s, j->beta);  // 1 - x
        const double dm = j->k * j->beta * std::pow(s, j->beta - 1.0);
        return 0.25 * ((dm + 1.0) / (m + s) - (dm - 1.0) / (m - s));
    }
    const double gc = spec.scale();
    double d1 = 0.0, d2 = 1.0;  // d(g/gc)/ds
    std::visit(overloaded{
                   [&](const StraightLine& p) { d1 = -p.k; },
                   [&](const Parabola& p) { d1 = -2.0 * p.k * (1.0 - p.k * s); },
                   [&](const PowerCurve& p) { d1 = -p.k * p.beta * std::pow(s, p.beta - 1.0); },
                   [&](const BoundaryLine& p) {
                       d1 = 1.0;
                       d2 = -1.0 / p.eta;
                   },
                   [](const JcmLine&) {},
               },
               spec.shape);
    const GammaGradient g = np_gamma_gradient(aqrm_at(spec, pt));
    return gc * (g.d_g1 * d1 + g.d_g2 * d2);
}

void RampSpec::validate() const
{
    if (!(delta > 0.0 && delta <= 0.1)) throw RangeError("RampSpec: delta must lie in (0, 0.1]");
    if (law == RampLaw::Custom && !(prefactor > 0.0)) throw RangeError("RampSpec: custom prefactor must be positive");
}

std::string to_string(RampLaw law)
{
    switch (law) {
    case RampLaw::GapLinear: return "GapLinear";
    case RampLaw::GapQuadratic: return "GapQuadratic";
    case RampLaw::GapCubic: return "GapCubic";
    case RampLaw::Custom: return "Custom";
    }
    return "?";
}

RampLaw ramp_law_from_string(const std::string& s)
{
    if (s == "GapLinear") return RampLaw::GapLinear;
    if (s == "GapQuadratic") return RampLaw::GapQuadratic;
    if (s == "GapCubic") return RampLaw::GapCubic;
    if (s == "Custom") return RampLaw::Custom;
    throw ConfigError("unknown ramp law '" + s + "'");
}

namespace {

[[noreturn]] void unsupported(const PathSpec& spec, const RampSpec& ramp)
{
    throw UnsupportedCombo("no ramp law " + to_string(ramp.law) + " defined for path " + spec.name());
}

}  // namespace

double ramp_rate(const PathSpec& spec, const RampSpec& ramp, double s)
{
    ramp.validate();
    const double gap = path_gap(spec, s);
    if (!(gap > 0.0)) throw GapClosed("ramp_rate: gap vanishes at the requested point");
    const double d = ramp.delta, w = spec.omega;
    if (ramp.law == RampLaw::Custom) return ramp.prefactor * d * w * std::pow(gap / w, ramp.exponent);
    return std::visit(overloaded{
                          [&](const StraightLine& p) {
                              if (ramp.law == RampLaw::GapLinear) return 2.0 * d * gap / p.k;
                              if (ramp.law == RampLaw::GapQuadratic) return 2.0 * d * gap * gap / (p.k * w);
                              unsupported(spec, ramp);
                          },
                          [&](const Parabola& p) {
                              if (ramp.law != RampLaw::GapLinear) unsupported(spec, ramp);
                              return 2.0 * d * gap / (5.0 * p.k);
                          },
                          [&](const PowerCurve& p) {
                              if (ramp.law != RampLaw::GapLinear) unsupported(spec, ramp);
                              return 2.0 * d / p.beta * s * gap;
                          },
                          [&](const BoundaryLine& p) {
                              if (ramp.law != RampLaw::GapCubic) unsupported(spec, ramp);
                              return d * (1.0 - p.eta) * gap * gap * gap / (4.0 * w * w);
                          },
                          [&](const JcmLine& p) {
                              if (ramp.law != RampLaw::GapLinear) unsupported(spec, ramp);
                              if (p.beta == 1.0) return d * gap;
                              return 2.0 * d / p.beta * s * gap;
                          },
                      },
                      spec.shape);
}

Schedule::Schedule(PathSpec spec, RampSpec ramp, std::vector<ScheduleSample> samples, double certificate)
    : spec_(std::move(spec)), ramp_(ramp), samples_(std::move(samples)), certificate_(certificate)
{
}

double Schedule::time_between(double s_a, double s_b) const
{
    auto inv_v = [&](double s) { return 1.0 / ramp_rate(spec_, ramp_, s); };
    // Elapsed time from the schedule start, exact on samples and one rule inside an interval.
    auto t_of = [&](double s) -> std::optional<double> {
        if (samples_.size() < 2) return std::nullopt;
        for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
            const double lo = std::min(samples_[i].s, samples_[i + 1].s);
            const double hi = std::max(samples_[i].s, samples_[i + 1].s);
            if (s >= lo && s <= hi) return samples_[i].t + std::abs(gauss_legendre8(inv_v, samples_[i].s, s));
        }
        return std::nullopt;
    };
    const auto ta = t_of(s_a), tb = t_of(s_b);
    if (ta && tb) return std::abs(*tb - *ta);
    // Outside the sampled range: uniform composite rule.
    const int pieces = 256;
    double len = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double x0 = s_a + (s_b - s_a) * double(k) / pieces;
        const double x1 = s_a + (s_b - s_a) * double(k + 1) / pieces;
        len += gauss_legendre8(inv_v, x0, x1);
    }
    return std::abs(len);
}

int Schedule::interval_of(double t) const
{
    if (samples_.size() < 2) throw RangeError("Schedule: no intervals");
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const ScheduleSample& x) { return v < x.t; });
    int i = int(it - samples_.begin()) - 1;
    return std::clamp(i, 0, int(samples_.size()) - 2);
}

double Schedule::s_at(double t, int hint) const
{
    if (samples_.size() < 2) throw RangeError("Schedule: no intervals");
    int i = hint;
    if (i < 0 || i + 1 >= int(samples_.size()) || t < samples_[i].t || t > samples_[i + 1].t) i = interval_of(t);
    const ScheduleSample& a = samples_[i];
    const ScheduleSample& b = samples_[i + 1];
    if (t <= a.t) return a.s;
    if (t >= b.t) return b.s;
    const double tau = t - a.t;
    const double dir = b.s > a.s ? 1.0 : -1.0;
    double lo = std::min(a.s, b.s), hi = std::max(a.s, b.s);
    double s = a.s + (b.s - a.s) * tau / (b.t - a.t);
    for (int it = 0; it < 60; ++it) {
        const double g = std::abs(gauss_legendre8([&](double x) { return 1.0 / ramp_rate(spec_, ramp_, x); }, a.s, s)) - tau;
        // g increases as s moves along dir
        if (g > 0.0) (dir > 0 ? hi : lo) = s;
        else (dir > 0 ? lo : hi) = s;
        double next = s - g * dir * ramp_rate(spec_, ramp_, s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-16 * std::abs(s)) return next;
        s = next;
    }
    return s;
}

Schedule build_schedule(const PathSpec& spec, const RampSpec& ramp, double s_start, double s_end,
                        const ScheduleGrid& grid)
{
    spec.validate();
    ramp.validate();
    if (s_start == s_end) return Schedule(spec, ramp, {}, 0.0);
    const double dir = s_end > s_start ? 1.0 : -1.0;
    if ((dir < 0) != sweeps_down(spec)) throw RangeError("build_schedule: sweep runs against the path direction");
    // Validates both endpoints (range and phase) and the ramp combination.
    ramp_rate(spec, ramp, s_start);
    ramp_rate(spec, ramp, s_end);

    const double span = std::abs(s_end - s_start);
    std::vector<double> nodes{s_start};
    double s = s_start, gap = path_gap(spec, s), h = span / 64.0;
    while (s != s_end) {
        const double remaining = std::abs(s_end - s);
        h = std::min({h, span / 32.0, remaining});
        for (;;) {
            const bool last = h >= remaining * (1.0 - 1e-9);
            const double next = last ? s_end : s + dir * h;
            const double g = path_gap(spec, next);
            if (std::abs(g / gap - 1.0) <= grid.max_gap_change) {
                nodes.push_back(next);
                s = next;
                gap = g;
                h *= 1.25;
                break;
            }
            h *= 0.5;
            if (h < 1e-14 * span) throw NoConvergence("build_schedule: gap varies too fast to resolve");
        }
    }

    auto inv_v = [&](double x) { return 1.0 / ramp_rate(spec, ramp, x); };
    std::vector<double> dt;
    double certificate = 0.0;
    for (int ref = 0;; ++ref) {
        dt.assign(nodes.size() - 1, 0.0);
        double coarse = 0.0, fine = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double a = nodes[i], b = nodes[i + 1], m = 0.5 * (a + b);
            coarse += std::abs(gauss_legendre8(inv_v, a, b));
            dt[i] = std::abs(gauss_legendre8(inv_v, a, m)) + std::abs(gauss_legendre8(inv_v, m, b));
            fine += dt[i];
        }
        certificate = std::abs(fine - coarse) / fine;
        if (certificate < grid.tol) break;
        if (ref >= grid.max_refinements)
            throw NoConvergence("build_schedule: quadrature certificate not reached");
        std::vector<double> refined{nodes.front()};
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            refined.push_back(0.5 * (nodes[i] + nodes[i + 1]));
            refined.push_back(nodes[i + 1]);
        }
        nodes.swap(refined);
    }

    std::vector<ScheduleSample> samples;
    samples.reserve(nodes.size());
    double t = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i > 0) t += dt[i - 1];
        const PathPoint pt = path_point(spec, nodes[i]);
        samples.push_back({t, nodes[i], pt.g1, pt.g2, ramp_rate(spec, ramp, nodes[i]), path_gap(spec, nodes[i])});
    }
    return Schedule(spec, ramp, std::move(samples), certificate);
}

TimeGrid dynamics_grid(const Schedule& schedule, int refine, double dt_max)
{
    if (refine < 1) throw RangeError("dynamics_grid: refine must be >= 1");
    const auto& smp = schedule.samples();
    if (smp.size() < 2) throw RangeError("dynamics_grid: schedule has no intervals");
    TimeGrid g;
    g.t.push_back(smp[0].t);
    g.sample.push_back(0);
    for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
        const double span = smp[i + 1].t - smp[i].t;
        const double v = std::max(smp[i].v, smp[i + 1].v);
        const double gap = std::max(smp[i].gap, smp[i + 1].gap);
        double need = std::max({1.0, v * span / 1e-3, gap * span / 0.1});
        if (dt_max > 0.0) need = std::max(need, span / dt_max);
        const int m = int(std::ceil(need)) * refine;
        for (int j = 1; j <= m; ++j) {
            g.t.push_back(j == m ? smp[i + 1].t : smp[i].t + span * j / m);
            g.sample.push_back(j == m ? int(i + 1) : -1);
            g.interval.push_back(int(i));
        }
    }
    return g;
}

std::string to_string(ScalingClass c)
{
    switch (c) {
    case ScalingClass::ExpSuperHS: return "ExpSuperHS";
    case ScalingClass::Heisenberg: return "Heisenberg";
    case ScalingClass::SubHS: return "SubHS";
    case ScalingClass::QuarticBoundary: return "QuarticBoundary";
    }
    return "?";
}

double powerlaw_qfi_asymptote(double k, double beta, double omega, double s)
{
    if (beta == 1.0) return 1.0 / (8.0 * omega * omega * std::pow(k * k - 1.0, 2)) / (s * s);
    return std::pow(s, 2.0 * (1.0 - 2.0 * beta)) / (8.0 * omega * omega * std::pow(k, 4));
}

Prediction predict(const PathSpec& spec, const RampSpec& ramp, double s_end)
{
    spec.validate();
    ramp.validate();
    if (ramp.law == RampLaw::Custom) unsupported(spec, ramp);
    ramp_rate(spec, ramp, s_end);  // validates the combination and the endpoint
    const double d = ramp.delta, w = spec.omega;
    Prediction pr;
    pr.N_final = path_mean_n(spec, s_end);
    auto& c = pr.coefficients;
    std::visit(
        overloaded{
            [&](const StraightLine& p) {
                const double k = p.k;
                c["N_limit"] = k / (2.0 * std::sqrt(k * k - 1.0)) - 0.5;
                if (ramp.law == RampLaw::GapLinear) {
                    const double aT = 1.0 / (4.0 * d * w * std::sqrt(1.0 - 1.0 / (k * k)));
                    const double b = 8.0 * d * w * std::sqrt(1.0 - 1.0 / (k * k));
                    const double a = 1.0 / (8.0 * w * w * std::pow(k * k - 1.0, 2));
                    pr.T_closed = -aT * std::log(s_end);
                    pr.F_final = a * std::exp(b * pr.T_closed);
                    pr.excitation = d * d / (32.0 * k * k);
                    pr.scaling = ScalingClass::ExpSuperHS;
                    c["a_T"] = aT;
                    c["b"] = b;
                    c["F_prefactor"] = a;
                } else {
                    const double Tc = k / (8.0 * d * w * (k * k - 1.0));
                    pr.T_closed = Tc / s_end;
                    pr.F_final = 8.0 * d * d * pr.T_closed * pr.T_closed / (k * k);
                    // Local end-point estimate |F_s / Theta_s|^2 / 2 with F_s -> 1/4.
                    const double gap = path_gap(spec, s_end);
                    pr.excitation = d * d * gap * gap / (32.0 * k * k * w * w);
                    pr.scaling = ScalingClass::Heisenberg;
                    c["T_coefficient"] = Tc;
                    c["T_exponent"] = 1.0;
                    c["F_prefactor"] = 8.0 * d * d / (k * k);
                    c["F_exponent"] = 2.0;
                    c["excitation_local_estimate"] = 1.0;
                }
            },
            [&](const Parabola& p) {
                const double k = p.k;
                const double aT = 5.0 / (8.0 * d * w);
                const double b = 16.0 * d * w / 5.0;
                const double a = 1.0 / (8.0 * w * w * std::pow(4.0 * k * k - 1.0, 2));
                pr.T_closed = -aT * std::log(s_end);
                pr.F_final = a * std::exp(b * pr.T_closed);
                pr.excitation = d * d / (25.0 * k * k);
                pr.scaling = ScalingClass::ExpSuperHS;
                c["a_T"] = aT;
                c["b"] = b;
                c["F_prefactor"] = a;
            },
            [&](const PowerCurve& p) {
                if (!(p.beta > 0.5)) unsupported(spec, ramp);
                const double k = p.k, be = p.beta;
                const double Tc = 1.0 / (4.0 * d * k * w);
                const double expo = 2.0 * (2.0 - 1.0 / be);
                pr.T_closed = Tc * std::pow(s_end, -be);
                pr.F_final = std::pow(4.0 * d * k * w * pr.T_closed, expo) / (8.0 * std::pow(k, 4) * w * w);
                pr.excitation = d * d / (8.0 * be * be * std::pow(k, 2.0 / be));
                pr.scaling = ScalingClass::SubHS;
                c["T_coefficient"] = Tc;
                c["T_exponent"] = be;
                c["F_exponent"] = expo;
                c["F_prefactor"] = std::pow(4.0 * d * k * w, expo) / (8.0 * std::pow(k, 4) * w * w);
            },
            [&](const BoundaryLine& p) {
                const double eta = p.eta;
                const double u = 1.0 - (1.0 - 1.0 / eta) * s_end;
                const double Tc = (1.0 - eta) / (2.0 * std::sqrt(-2.0 * eta) * d * w);
                const double a = 2.0 * std::pow(d, 4) * w * w * eta * eta / std::pow(1.0 - eta, 4);
                pr.T_closed = Tc / std::sqrt(u);
                pr.F_final = a * std::pow(pr.T_closed, 4);
                pr.excitation = d * d / 32.0;
                pr.scaling = ScalingClass::QuarticBoundary;
                c["T_coefficient"] = Tc;
                c["T_exponent"] = 0.5;
                c["F_prefactor"] = a;
                c["F_exponent"] = 4.0;
            },
            [&](const JcmLine& p) {
                const double k = p.k, be = p.beta;
                if (be == 1.0) {
                    const double aT = 1.0 / (d * w * std::sqrt(k * k - 1.0));
                    const double b = 2.0 * d * std::sqrt(k * k - 1.0) * w;
                    const double a = 1.0 / (2.0 * w * w * std::pow(k * k - 1.0, 2));
                    pr.T_closed = -aT * std::log(s_end);
                    pr.F_final = a * std::exp(b * pr.T_closed);
                    pr.excitation = 0.0;
                    pr.scaling = ScalingClass::ExpSuperHS;
                    c["a_T"] = aT;
                    c["b"] = b;
                    c["F_prefactor"] = a;
                } else {
                    const double Tc = 1.0 / (2.0 * d * w * k);
                    const double expo = 2.0 * (2.0 - 1.0 / be);
                    pr.T_closed = Tc * std::pow(s_end, -be);
                    pr.F_final = std::pow(2.0 * d * k * w * pr.T_closed, expo) / (2.0 * w * w * std::pow(k, 4));
                    pr.excitation = d * d / (8.0 * be * be) * std::pow(k, -2.0 / be);
                    pr.scaling = ScalingClass::SubHS;
                    c["T_coefficient"] = Tc;
                    c["T_exponent"] = be;
                    c["F_exponent"] = expo;
                    c["F_prefactor"] = std::pow(2.0 * d * k * w, expo) / (2.0 * w * w * std::pow(k, 4));
                }
            },
        },
        spec.shape);
    return pr;
}

}  // namespace critmet
