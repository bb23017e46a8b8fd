#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "critmet/evolve.hpp"
#include "critmet/schedules.hpp"

namespace critmet {

inline constexpr const char* kArtifactVersion = "1.0.0";

// ---------------------------------------------------------------- fitting

// Exponential   F = a e^{b T}       fit ln F against T
// Power         F = a T^b           fit ln F against ln T
// LogTime       T = a ln(1/x) + b   fit T against ln(1/x), x = control / scale
// InversePower  T = a x^{-b}        fit ln T against ln x
enum class FitModel { Exponential, Power, LogTime, InversePower };

std::string to_string(FitModel m);
FitModel fit_model_from_string(const std::string& s);

struct FitWindow {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct FitResult {
    FitModel model = FitModel::Exponential;
    double a = 0.0;
    double a_err = 0.0;
    double b = 0.0;
    double b_err = 0.0;
    bool b_fixed = false;
    double window_lo = 0.0;  // extent of the x values actually used
    double window_hi = 0.0;
    double rms = 0.0;  // residual RMS in the linearized space
    int n = 0;

    double operator()(double x) const;
};

// OLS in the linearized space; with `fixed_b` only the prefactor is fitted.
FitResult fit_scaling(const std::vector<double>& x, const std::vector<double>& y, FitModel model,
                      const FitWindow& window = {}, std::optional<double> fixed_b = std::nullopt);

// ---------------------------------------------------------------- output

// Columnar text: one JSON metadata line prefixed by '#', a header, then rows.
struct OutputRecord {
    std::string name;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    void add_row(std::vector<std::string> cells);
    std::vector<double> column(const std::string& name) const;
    void write(std::ostream& os) const;
};

std::string format_number(double x);

// ---------------------------------------------------------------- configuration

enum class Engine { Analytic, Gaussian, Schrodinger, Lindblad };
std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

struct OutputsRequested {
    bool qfi = true;
    bool snr = false;
    bool trajectory = false;
    bool fits = true;
};

struct SweepConfig {
    std::string preset = "custom";
    PathSpec path{StraightLine{2.0}, 1e6, 1.0};
    RampSpec ramp;
    std::optional<double> s_start;  // defaults from the path
    std::optional<double> s_end;
    ScheduleGrid grid;
    Engine engine = Engine::Gaussian;
    int n_max = 40;
    OutputsRequested outputs;
    std::optional<LindbladConfig> dissipation;
    double fit_decades = 1.0;

    void validate() const;
    nlohmann::json to_json() const;
    static SweepConfig from_json(const nlohmann::json& j);
    // FNV-1a over the canonical JSON text, as 16 hex digits.
    std::string hash() const;
    double start() const;
    double end() const;
};

std::vector<std::string> preset_names();
SweepConfig preset(const std::string& name);

// ---------------------------------------------------------------- sweeps

struct NamedFit {
    std::string target;  // e.g. "T~s", "F_fidelity~T"
    FitResult fit;
};

struct SweepResult {
    SweepConfig config;
    Prediction prediction;
    std::vector<OutputRecord> records;
    std::vector<NamedFit> fits;
    double total_time = 0.0;
    int flagged_samples = 0;  // samples whose dynamic QFI did not converge

    const OutputRecord& record(const std::string& name) const;
    const FitResult& fit(const std::string& target) const;
};

SweepResult run_sweep(const SweepConfig& config);

// One nominal run of the configured engine with the `evolve` column schema;
// the Lindblad engine appends sigma_z (NaN for bosonic models).
OutputRecord evolve_once(const SweepConfig& config);

// Distance variable for fits: s itself, or 1 - (1 - 1/eta) s on the boundary line.
double fit_distance(const PathSpec& spec, double s);

// Runs f(0..n-1) on a bounded pool; results in index order.
void parallel_for(int n, const std::function<void(int)>& f, int workers = 0);

// ---------------------------------------------------------------- surfaces

// (g1, g2, phase, abs_alpha, alpha_re, alpha_im, dx, dp, gap) on an n x n grid of
// [lo, hi]^2 in units of g_c; points inside the classification band are NaN rows.
OutputRecord phase_surface(double Omega, double omega, double lo, double hi, int n);
// (g1, g2, F_analytic, F_fidelity, gamma, gap) over NP points of the grid.
OutputRecord qfi_map(double Omega, double omega, double lo, double hi, int n);

// ---------------------------------------------------------------- reproduction

enum class VerdictStatus { Pass, Fail, Flag, Info };
std::string to_string(VerdictStatus s);

struct Verdict {
    std::string preset;
    std::string item;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;  // relative unless noted
    VerdictStatus status = VerdictStatus::Info;
    std::string note;
};

struct Report {
    std::string figure;
    std::vector<Verdict> verdicts;
    std::vector<OutputRecord> records;

    bool all_pass() const;
    void write(std::ostream& os) const;
};

std::vector<std::string> figure_ids();
Report reproduce(const std::string& figure_id);

}  // namespace critmet
