#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "epimix/model.hpp"

namespace testutil {

// Reference two-wave parameters used across the suite.
struct TwoWave {
    double a1 = 0.0005, m1 = 250000.0, c1 = 50.0;
    double a2 = 0.0007, m2 = 300000.0, c2 = 170.0;

    epimix::Component first() const { return epimix::from_peak_form(m1, c1, a1); }
    epimix::Component second() const { return epimix::from_peak_form(m2, c2, a2); }
    double eval(double t) const {
        return m1 * std::exp(-a1 * (t - c1) * (t - c1)) +
               m2 * std::exp(-a2 * (t - c2) * (t - c2));
    }
};

// Noisy observations N(t) = f(t)(1 + eta_t), eta ~ U[-amp, amp].
inline epimix::CaseSeries two_wave_series(double noise_amp, uint64_t seed, int t0 = 0,
                                          int len = 200, TwoWave params = TwoWave{}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-noise_amp, noise_amp);
    std::vector<double> values(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) {
        const double eta = noise_amp > 0.0 ? noise(rng) : 0.0;
        values[static_cast<size_t>(i)] = params.eval(t0 + i) * (1.0 + eta);
    }
    return epimix::CaseSeries(t0, std::move(values));
}

inline epimix::CaseSeries single_wave_series(double a, double m, double c, int t0, int len,
                                             double noise_amp = 0.0, uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-noise_amp, noise_amp);
    std::vector<double> values(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) {
        const double t = static_cast<double>(t0 + i);
        const double eta = noise_amp > 0.0 ? noise(rng) : 0.0;
        values[static_cast<size_t>(i)] = m * std::exp(-a * (t - c) * (t - c)) * (1.0 + eta);
    }
    return epimix::CaseSeries(t0, std::move(values));
}

inline epimix::Component random_component(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ua(1e-4, 5e-2);
    std::uniform_real_distribution<double> uc(-40.0, 120.0);
    std::uniform_real_distribution<double> um(0.5, 5e5);
    return epimix::from_peak_form(um(rng), uc(rng), ua(rng));
}

// The baseline fitter the reference experiment compares against: alternating
// sweeps of fixed-step gradient descent on (a, b, c) in unit-time coordinates
// with no line search, so divergence is possible (that is the point of the
// comparison). Returns the final r^2, with exploded fits scored through a
// saturating evaluator instead of throwing.
constexpr double kBaselineStep = 0.1;

struct BaselineParams {
    double a, b, c;
};

inline double baseline_eval(const BaselineParams& p, double t) {
    const double expo = (-p.a * t + p.b) * t + p.c;
    return std::exp(std::min(expo, 700.0));
}

inline double baseline_r2(const std::vector<BaselineParams>& comps,
                          const epimix::CaseSeries& series) {
    double mean = 0.0;
    for (double v : series.values()) mean += v;
    mean /= static_cast<double>(series.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (int i = 0; i < series.size(); ++i) {
        const double t = static_cast<double>(series.t0() + i);
        double fit = 0.0;
        for (const auto& comp : comps) fit += baseline_eval(comp, t);
        const double y = series.values()[static_cast<size_t>(i)];
        ss_res += (fit - y) * (fit - y);
        ss_tot += (y - mean) * (y - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

inline double baseline_fixed_step_fit(std::vector<BaselineParams> comps,
                                      const epimix::CaseSeries& series, double step,
                                      int sweeps, int inner_steps) {
    const double t_scale =
        std::max(1.0, static_cast<double>(std::max(std::abs(series.t0()),
                                                   std::abs(series.t_last()))));
    const double y_scale2 = [&] {
        double m = 0.0;
        for (double v : series.values()) m = std::max(m, v);
        return m * m;
    }();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (size_t k = 0; k < comps.size(); ++k) {
            for (int it = 0; it < inner_steps; ++it) {
                double ga = 0.0, gb = 0.0, gc = 0.0;
                for (int i = 0; i < series.size(); ++i) {
                    const double t = static_cast<double>(series.t0() + i);
                    double others = 0.0;
                    for (size_t j = 0; j < comps.size(); ++j)
                        if (j != k) others += baseline_eval(comps[j], t);
                    const double f = baseline_eval(comps[k], t);
                    const double resid =
                        f - (series.values()[static_cast<size_t>(i)] - others);
                    const double w = 2.0 * resid * f;
                    ga += w * (-t * t);
                    gb += w * t;
                    gc += w;
                }
                if (!std::isfinite(ga + gb + gc)) break;  // exploded; leave as is
                // gradient steps in the unit-time coordinates (a T^2, b T, c)
                const double t2 = t_scale * t_scale;
                comps[k].a -= step * ga / (t2 * t2) / y_scale2;
                comps[k].b -= step * gb / t2 / y_scale2;
                comps[k].c -= step * gc / y_scale2;
            }
        }
    }
    return baseline_r2(comps, series);
}

}  // namespace testutil
