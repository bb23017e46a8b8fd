#include <cmath>

#include "critmet/driver.hpp"
#include "critmet/errors.hpp"

namespace critmet {

std::string to_string(FitModel m)
{
    switch (m) {
    case FitModel::Exponential: return "Exponential";
    case FitModel::Power: return "Power";
    case FitModel::LogTime: return "LogTime";
    case FitModel::InversePower: return "InversePower";
    }
    return "?";
}

FitModel fit_model_from_string(const std::string& s)
{
    for (FitModel m : {FitModel::Exponential, FitModel::Power, FitModel::LogTime, FitModel::InversePower})
        if (to_string(m) == s) return m;
    throw RangeError("unknown fit model '" + s + "'");
}

double FitResult::operator()(double x) const
{
    switch (model) {
    case FitModel::Exponential: return a * std::exp(b * x);
    case FitModel::Power: return a * std::pow(x, b);
    case FitModel::LogTime: return a * std::log(1.0 / x) + b;
    case FitModel::InversePower: return a * std::pow(x, -b);
    }
    return 0.0;
}

FitResult fit_scaling(const std::vector<double>& x, const std::vector<double>& y, FitModel model,
                      const FitWindow& window, std::optional<double> fixed_b)
{
    if (x.size() != y.size()) throw RangeError("fit_scaling: x and y differ in length");
    const bool log_x = model == FitModel::Power || model == FitModel::LogTime || model == FitModel::InversePower;
    const bool log_y = model != FitModel::LogTime;

    std::vector<double> X, Y;
    FitResult r;
    r.model = model;
    r.window_lo = std::numeric_limits<double>::infinity();
    r.window_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= window.lo && x[i] <= window.hi)) continue;
        if (!std::isfinite(y[i])) continue;
        if ((log_x && !(x[i] > 0.0)) || (log_y && !(y[i] > 0.0)))
            throw NonPositiveData("fit_scaling: log transform needs positive data");
        double xi = log_x ? std::log(x[i]) : x[i];
        if (model == FitModel::LogTime) xi = -xi;
        X.push_back(xi);
        Y.push_back(log_y ? std::log(y[i]) : y[i]);
        r.window_lo = std::min(r.window_lo, x[i]);
        r.window_hi = std::max(r.window_hi, x[i]);
    }
    const int n = int(X.size());
    if (n < 10) throw InsufficientData("fit_scaling: fewer than 10 samples in the window");
    r.n = n;

    // Line Y = c0 + c1 X in the transformed space.
    double c0 = 0.0, c1 = 0.0, se0 = 0.0, se1 = 0.0;
    double xm = 0.0, ym = 0.0;
    for (int i = 0; i < n; ++i) {
        xm += X[i];
        ym += Y[i];
    }
    xm /= n;
    ym /= n;
    double ssr = 0.0;
    if (fixed_b) {
        r.b_fixed = true;
        if (model == FitModel::LogTime) {
            // T - b = a X through the origin.
            double sxy = 0.0, sxx = 0.0;
            for (int i = 0; i < n; ++i) {
                sxy += X[i] * (Y[i] - *fixed_b);
                sxx += X[i] * X[i];
            }
            c1 = sxy / sxx;
            c0 = *fixed_b;
            for (int i = 0; i < n; ++i) ssr += std::pow(Y[i] - c0 - c1 * X[i], 2);
            se1 = std::sqrt(ssr / std::max(1, n - 1) / sxx);
        } else {
            c1 = model == FitModel::InversePower ? -*fixed_b : *fixed_b;
            c0 = ym - c1 * xm;
            for (int i = 0; i < n; ++i) ssr += std::pow(Y[i] - c0 - c1 * X[i], 2);
            se0 = std::sqrt(ssr / std::max(1, n - 1) / n);
        }
    } else {
        double sxx = 0.0, sxy = 0.0;
        for (int i = 0; i < n; ++i) {
            sxx += (X[i] - xm) * (X[i] - xm);
            sxy += (X[i] - xm) * (Y[i] - ym);
        }
        if (!(sxx > 0.0)) throw InsufficientData("fit_scaling: window holds a single abscissa");
        c1 = sxy / sxx;
        c0 = ym - c1 * xm;
        for (int i = 0; i < n; ++i) ssr += std::pow(Y[i] - c0 - c1 * X[i], 2);
        const double s2 = ssr / (n - 2);
        se1 = std::sqrt(s2 / sxx);
        se0 = std::sqrt(s2 * (1.0 / n + xm * xm / sxx));
    }
    r.rms = std::sqrt(ssr / n);

    switch (model) {
    case FitModel::Exponential:
    case FitModel::Power:
        r.a = std::exp(c0);
        r.a_err = r.a * se0;
        r.b = c1;
        r.b_err = se1;
        break;
    case FitModel::InversePower:
        r.a = std::exp(c0);
        r.a_err = r.a * se0;
        r.b = -c1;
        r.b_err = se1;
        break;
    case FitModel::LogTime:
        r.a = c1;
        r.a_err = se1;
        r.b = c0;
        r.b_err = se0;
        break;
    }
    if (fixed_b) {
        r.b = *fixed_b;
        r.b_err = 0.0;
    }
    return r;
}

}  // namespace critmet
