#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace epimix {

/// Daily case counts indexed by integer day. Values are strictly positive
/// (preprocessing floors zeros) and at least three points are required so
/// the three-point log second difference is defined somewhere.
class CaseSeries {
public:
    CaseSeries(int t0, std::vector<double> values);

    int t0() const { return t0_; }
    int size() const { return static_cast<int>(values_.size()); }
    int t_last() const { return t0_ + size() - 1; }
    const std::vector<double>& values() const { return values_; }
    double at_time(int t) const { return values_.at(static_cast<size_t>(t - t0_)); }

private:
    int t0_;
    std::vector<double> values_;
};

/// One Gaussian curve exp(-a t^2 + b t + c), a > 0. Stored canonically in
/// (a, b, c); the peak form (M, C, a) is a derived view.
class Component {
public:
    Component(double a, double b, double c);

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }

    /// Height of the curve at its maximum, exp(c + b^2/(4a)).
    double peak_height() const { return std::exp(c_ + b_ * b_ / (4.0 * a_)); }
    /// Day at which the maximum is attained, b/(2a).
    double peak_time() const { return b_ / (2.0 * a_); }

private:
    double a_, b_, c_;
};

/// exp(-a t^2 + b t + c) with the exponent computed first. Exponents below
/// -700 saturate to 0; above +700 they signal parameters outside the
/// representable range.
double eval_component(const Component& comp, double t);

/// (M, C, a) view of a component; eval_component(comp, C) == M.
struct PeakForm {
    double peak_height;  // M
    double peak_time;    // C
    double curvature;    // a
};

PeakForm to_peak_form(const Component& comp);

/// Inverse of to_peak_form: b = 2 C a, c = log M - C^2 a. Requires M > 0, a > 0.
Component from_peak_form(double peak_height, double peak_time, double curvature);

/// Ordered sum of Gaussian components plus fit diagnostics. Components are
/// kept sorted ascending by peak time.
struct Mixture {
    std::vector<Component> components;
    double loss = 0.0;       // value of the l2 objective against the fitted series
    double bic = 0.0;
    double r_squared = 0.0;

    int r() const { return static_cast<int>(components.size()); }
    double eval(double t) const;

    /// Sorts components ascending by peak time (stable on ties).
    void sort_components();
};

/// Bound on the multiplicative observation noise: |eta_t| <= delta < 1.
/// The proposition-style bound B plays the same role under a different name.
struct NoiseBound {
    double delta = 0.0;

    explicit NoiseBound(double d = 0.0) : delta(d) {
        if (!(delta >= 0.0 && delta < 1.0))
            throw std::invalid_argument("NoiseBound: delta must lie in [0, 1)");
    }
};

/// Mixture JSON with the exact field names
/// {"r", "components":[{"a","b","c","peak_height","peak_time"}], "loss", "bic", "r_squared"}.
std::string mixture_to_json(const Mixture& m);
Mixture mixture_from_json(const std::string& text);

}  // namespace epimix
