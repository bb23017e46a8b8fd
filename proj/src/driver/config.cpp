#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"

namespace critmet {

using nlohmann::json;

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

void OutputRecord::add_row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

void OutputRecord::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns.size()) throw RangeError("OutputRecord: row width differs from the header");
    rows.push_back(std::move(cells));
}

std::vector<double> OutputRecord::column(const std::string& col) const
{
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end()) throw RangeError("OutputRecord: no column '" + col + "' in " + name);
    const auto j = std::size_t(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::strtod(r[j].c_str(), nullptr));
    return out;
}

void OutputRecord::write(std::ostream& os) const
{
    json m = meta;
    m["record"] = name;
    os << "# " << m.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

std::string to_string(Engine e)
{
    switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Gaussian: return "gaussian";
    case Engine::Schrodinger: return "schrodinger";
    case Engine::Lindblad: return "lindblad";
    }
    return "?";
}

Engine engine_from_string(const std::string& s)
{
    for (Engine e : {Engine::Analytic, Engine::Gaussian, Engine::Schrodinger, Engine::Lindblad})
        if (to_string(e) == s) return e;
    throw RangeError("unknown engine '" + s + "'");
}

namespace {

json path_to_json(const PathSpec& p)
{
    json j;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StraightLine>) {
                j["shape"] = "StraightLine";
                j["k"] = v.k;
            } else if constexpr (std::is_same_v<T, Parabola>) {
                j["shape"] = "Parabola";
                j["k"] = v.k;
            } else if constexpr (std::is_same_v<T, PowerCurve>) {
                j["shape"] = "PowerCurve";
                j["k"] = v.k;
                j["beta"] = v.beta;
            } else if constexpr (std::is_same_v<T, BoundaryLine>) {
                j["shape"] = "BoundaryLine";
                j["eta"] = v.eta;
            } else {
                j["shape"] = "JcmLine";
                j["k"] = v.k;
                j["beta"] = v.beta;
            }
        },
        p.shape);
    j["Omega"] = p.Omega;
    j["omega"] = p.omega;
    return j;
}

PathSpec path_from_json(const json& j)
{
    const std::string shape = j.at("shape").get<std::string>();
    PathSpec p{StraightLine{2.0}, j.value("Omega", 1e6), j.value("omega", 1.0)};
    if (shape == "StraightLine")
        p.shape = StraightLine{j.at("k").get<double>()};
    else if (shape == "Parabola")
        p.shape = Parabola{j.at("k").get<double>()};
    else if (shape == "PowerCurve")
        p.shape = PowerCurve{j.at("k").get<double>(), j.at("beta").get<double>()};
    else if (shape == "BoundaryLine")
        p.shape = BoundaryLine{j.at("eta").get<double>()};
    else if (shape == "JcmLine")
        p.shape = JcmLine{j.at("k").get<double>(), j.value("beta", 1.0)};
    else
        throw RangeError("unknown path shape '" + shape + "'");
    return p;
}

std::string mode_name(LindbladMode m) { return m == LindbladMode::FullModel ? "FullModel" : "BosonicOnly"; }

LindbladMode mode_from_string(const std::string& s)
{
    if (s == "FullModel") return LindbladMode::FullModel;
    if (s == "BosonicOnly") return LindbladMode::BosonicOnly;
    throw RangeError("unknown dissipation mode '" + s + "'");
}

}  // namespace

void SweepConfig::validate() const
{
    path.validate();
    ramp.validate();
    if (n_max < 2 || n_max > 400) throw RangeError("sweep: n_max must lie in [2, 400]");
    if (!(fit_decades > 0.0)) throw RangeError("sweep: fit_decades must be positive");
    if (engine == Engine::Lindblad && !dissipation) throw RangeError("sweep: lindblad engine needs a dissipation block");
    if (dissipation && (dissipation->kappa_p < 0.0 || dissipation->kappa_a < 0.0))
        throw RangeError("sweep: dissipation rates must be non-negative");
}

double SweepConfig::start() const { return s_start ? *s_start : default_start(path); }
double SweepConfig::end() const { return s_end ? *s_end : default_end(path); }

json SweepConfig::to_json() const
{
    json j;
    j["preset"] = preset;
    j["path"] = path_to_json(path);
    j["ramp"] = {{"delta", ramp.delta},
                 {"law", critmet::to_string(ramp.law)},
                 {"exponent", ramp.exponent},
                 {"prefactor", ramp.prefactor}};
    j["s_start"] = start();
    j["s_end"] = end();
    j["grid"] = {{"max_gap_change", grid.max_gap_change}, {"tol", grid.tol}, {"max_refinements", grid.max_refinements}};
    j["engine"] = critmet::to_string(engine);
    j["n_max"] = n_max;
    j["outputs"] = {{"qfi", outputs.qfi}, {"snr", outputs.snr}, {"trajectory", outputs.trajectory}, {"fits", outputs.fits}};
    if (dissipation)
        j["dissipation"] = {{"kappa_p", dissipation->kappa_p},
                            {"kappa_a", dissipation->kappa_a},
                            {"mode", mode_name(dissipation->mode)},
                            {"dt_max", dissipation->dt_max}};
    j["fit_decades"] = fit_decades;
    return j;
}

SweepConfig SweepConfig::from_json(const json& j)
{
    try {
        SweepConfig c;
        if (j.contains("preset") && j["preset"].get<std::string>() != "custom") {
            const std::string name = j["preset"].get<std::string>();
            c = critmet::preset(name);
        }
        if (j.contains("path")) c.path = path_from_json(j["path"]);
        if (j.contains("ramp")) {
            const auto& r = j["ramp"];
            c.ramp.delta = r.value("delta", c.ramp.delta);
            if (r.contains("law")) c.ramp.law = ramp_law_from_string(r["law"].get<std::string>());
            c.ramp.exponent = r.value("exponent", c.ramp.exponent);
            c.ramp.prefactor = r.value("prefactor", c.ramp.prefactor);
        }
        if (j.contains("s_start")) c.s_start = j["s_start"].get<double>();
        if (j.contains("s_end")) c.s_end = j["s_end"].get<double>();
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            c.grid.max_gap_change = g.value("max_gap_change", c.grid.max_gap_change);
            c.grid.tol = g.value("tol", c.grid.tol);
            c.grid.max_refinements = g.value("max_refinements", c.grid.max_refinements);
        }
        if (j.contains("engine")) c.engine = engine_from_string(j["engine"].get<std::string>());
        c.n_max = j.value("n_max", c.n_max);
        if (j.contains("outputs")) {
            const auto& o = j["outputs"];
            c.outputs.qfi = o.value("qfi", c.outputs.qfi);
            c.outputs.snr = o.value("snr", c.outputs.snr);
            c.outputs.trajectory = o.value("trajectory", c.outputs.trajectory);
            c.outputs.fits = o.value("fits", c.outputs.fits);
        }
        if (j.contains("dissipation") && !j["dissipation"].is_null()) {
            const auto& d = j["dissipation"];
            LindbladConfig l = c.dissipation.value_or(LindbladConfig{});
            l.kappa_p = d.value("kappa_p", l.kappa_p);
            l.kappa_a = d.value("kappa_a", l.kappa_a);
            if (d.contains("mode")) l.mode = mode_from_string(d["mode"].get<std::string>());
            l.dt_max = d.value("dt_max", l.dt_max);
            c.dissipation = l;
        }
        c.fit_decades = j.value("fit_decades", c.fit_decades);
        if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw RangeError(std::string("sweep config: ") + e.what());
    }
}

std::string SweepConfig::hash() const
{
    const std::string text = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> preset_names()
{
    return {"fig2-k2",      "fig2-k1.5",    "heisenberg-k2", "powercurve-b2/3", "powercurve-b1/2",
            "figS4-eta-1",  "figS4-eta-3",  "figS6-jcm",     "fig3",            "trapped-ion"};
}

SweepConfig preset(const std::string& name)
{
    // Main-text units: omega = 0.25 and Omega/omega = 1e6 give g_c = 500.
    const double w = 0.25, W = 2.5e5;
    SweepConfig c;
    c.preset = name;
    c.ramp.delta = 1e-3;
    c.path = {StraightLine{2.0}, W, w};
    if (name == "fig2-k2") {
        c.engine = Engine::Gaussian;
    } else if (name == "fig2-k1.5") {
        c.path.shape = StraightLine{1.5};
        c.engine = Engine::Gaussian;
    } else if (name == "heisenberg-k2") {
        c.ramp.law = RampLaw::GapQuadratic;
        c.engine = Engine::Analytic;
    } else if (name == "powercurve-b2/3" || name == "powercurve-b1/2") {
        c.path.shape = PowerCurve{2.0, name == "powercurve-b2/3" ? 2.0 / 3.0 : 0.5};
        c.s_end = 1e-4;
        c.engine = Engine::Analytic;
    } else if (name == "figS4-eta-1" || name == "figS4-eta-3") {
        c.path.shape = BoundaryLine{name == "figS4-eta-1" ? -1.0 : -3.0};
        c.ramp.law = RampLaw::GapCubic;
        c.engine = Engine::Gaussian;
    } else if (name == "figS6-jcm") {
        c.path.shape = JcmLine{3.0, 1.0};
        c.engine = Engine::Gaussian;
    } else if (name == "fig3") {
        // Spin splitting reduced to Omega/omega = 200 so the full model fits on a desk.
        c.path = {StraightLine{2.0}, 200.0 * w, w};
        c.engine = Engine::Lindblad;
        c.n_max = 60;
        c.outputs.snr = true;
        c.outputs.fits = false;
        c.dissipation = LindbladConfig{0.01 * w, 0.01 * 200.0 * w, LindbladMode::FullModel, 0.0, 4};
    } else if (name == "trapped-ion") {
        const double wi = 2.0 * std::numbers::pi * 1e3, Wi = 2.0 * std::numbers::pi * 250e3;
        c.path = {StraightLine{2.0}, Wi, wi};
        c.engine = Engine::Gaussian;
        c.outputs.snr = true;
        c.dissipation = LindbladConfig{0.01 * wi, 0.01 * Wi, LindbladMode::FullModel, 0.0, 4};
    } else {
        throw RangeError("unknown preset '" + name + "'");
    }
    c.validate();
    return c;
}

}  // namespace critmet
