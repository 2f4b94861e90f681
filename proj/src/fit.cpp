#include "epimix/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epimix {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kMinStep = 1e-18;
constexpr double kMaxStep = 4.0;
constexpr double kMaxExponent = 709.0;

// Component refits run in a normalized space: time divided by t_scale and
// targets by y_scale, so step sizes are invariant under rescaling either axis.
// The exponent is carried in peak-centered coordinates
//   f = exp(h - e^u (tau - p)^2),
// i.e. log peak height, peak time, log curvature: these are nearly decoupled
// around the optimum, where the raw (a, b, c) axes are so correlated that
// plain descent stalls far from the minimum.
struct FitScale {
    double t_scale = 1.0;
    double y_scale = 1.0;
};

FitScale scale_for(const TargetSeries& target) {
    FitScale s;
    const double t_lo = std::abs(static_cast<double>(target.t0));
    const double t_hi = std::abs(static_cast<double>(target.t0 + target.size() - 1));
    s.t_scale = std::max(1.0, std::max(t_lo, t_hi));
    double ymax = 0.0;
    for (double v : target.values) ymax = std::max(ymax, std::abs(v));
    s.y_scale = ymax > 0.0 ? ymax : 1.0;
    return s;
}

struct ScaledParams {
    double h;  // log(M / y_scale)
    double p;  // C / t_scale
    double u;  // log(a * t_scale^2)
};

bool representable(const ScaledParams& sp, const FitScale& s) {
    // Peak height must stay finite, and a component that degenerates into a
    // spike narrower than machine scale or a peak placed astronomically far
    // from the window is a runaway, not a fit.
    return sp.h + std::log(s.y_scale) <= 700.0 && sp.u <= 30.0 && std::abs(sp.p) <= 100.0;
}

double scaled_loss(const ScaledParams& sp, const TargetSeries& target, const FitScale& s) {
    const double a = std::exp(sp.u);
    double acc = 0.0;
    for (int i = 0; i < target.size(); ++i) {
        const double tau = static_cast<double>(target.t0 + i) / s.t_scale;
        const double expo = sp.h - a * (tau - sp.p) * (tau - sp.p);
        if (expo > kMaxExponent) return std::numeric_limits<double>::infinity();
        const double f = expo < -kMaxExponent ? 0.0 : std::exp(expo);
        const double e = f - target.values[static_cast<size_t>(i)] / s.y_scale;
        acc += e * e;
    }
    return acc;
}

std::array<double, 3> scaled_gradient(const ScaledParams& sp, const TargetSeries& target,
                                      const FitScale& s) {
    const double a = std::exp(sp.u);
    double gh = 0.0, gp = 0.0, gu = 0.0;
    for (int i = 0; i < target.size(); ++i) {
        const double tau = static_cast<double>(target.t0 + i) / s.t_scale;
        const double dtau = tau - sp.p;
        const double expo = sp.h - a * dtau * dtau;
        const double f = expo < -kMaxExponent ? 0.0 : std::exp(std::min(expo, kMaxExponent));
        const double e = f - target.values[static_cast<size_t>(i)] / s.y_scale;
        const double w = 2.0 * e * f;
        gh += w;
        gp += w * 2.0 * a * dtau;
        gu += w * (-a * dtau * dtau);
    }
    return {gh, gp, gu};
}

ScaledParams to_scaled(const Component& comp, const FitScale& s) {
    const PeakForm pf = to_peak_form(comp);
    return {std::log(pf.peak_height / s.y_scale), pf.peak_time / s.t_scale,
            std::log(pf.curvature * s.t_scale * s.t_scale)};
}

Component from_scaled(const ScaledParams& sp, const FitScale& s) {
    // A component driven to nothing underflows e^h or e^u; keep both positive.
    const double h = std::max(sp.h, -700.0);
    const double u = std::max(sp.u, -700.0);
    return from_peak_form(std::exp(h) * s.y_scale, sp.p * s.t_scale,
                          std::exp(u) / (s.t_scale * s.t_scale));
}

}  // namespace

void FitConfig::validate() const {
    if (max_outer_iters < 1 || max_inner_iters < 1)
        throw std::invalid_argument("FitConfig: iteration caps must be >= 1");
    if (!(step_size > 0.0)) throw std::invalid_argument("FitConfig: step_size must be > 0");
    if (!(loss_rel_tol > 0.0 && loss_rel_tol < 1.0))
        throw std::invalid_argument("FitConfig: loss_rel_tol must lie in (0, 1)");
    if (r_max < 1) throw std::invalid_argument("FitConfig: r_max must be >= 1");
}

double loss(const Mixture& mix, const CaseSeries& series) {
    double acc = 0.0;
    for (int i = 0; i < series.size(); ++i) {
        const double t = static_cast<double>(series.t0() + i);
        const double e = mix.eval(t) - series.values()[static_cast<size_t>(i)];
        acc += e * e;
    }
    return acc;
}

double r_squared(const Mixture& mix, const CaseSeries& series) {
    double mean = 0.0;
    for (double v : series.values()) mean += v;
    mean /= static_cast<double>(series.size());
    double ss_tot = 0.0;
    for (double v : series.values()) ss_tot += (v - mean) * (v - mean);
    const double l = loss(mix, series);
    if (ss_tot <= 0.0) return l <= 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - l / ss_tot;
}

double bic_score(int r, int num_obs, double loss_value) {
    const double t = static_cast<double>(num_obs);
    return 3.0 * r * std::log(t) + t * std::log(std::max(loss_value, kTiny) / t);
}

TargetSeries residual_target(const CaseSeries& series, const Mixture& mix, int k) {
    if (k < 0 || k >= mix.r())
        throw std::invalid_argument("residual_target: component index out of range");
    TargetSeries target;
    target.t0 = series.t0();
    target.values.resize(static_cast<size_t>(series.size()));
    for (int i = 0; i < series.size(); ++i) {
        const double t = static_cast<double>(series.t0() + i);
        double others = 0.0;
        for (int j = 0; j < mix.r(); ++j) {
            if (j != k) others += eval_component(mix.components[static_cast<size_t>(j)], t);
        }
        target.values[static_cast<size_t>(i)] =
            series.values()[static_cast<size_t>(i)] - others;
    }
    return target;
}

std::array<double, 3> loss_gradient_single(const Component& comp, const TargetSeries& target) {
    double ga = 0.0, gb = 0.0, gc = 0.0;
    for (int i = 0; i < target.size(); ++i) {
        const double t = static_cast<double>(target.t0 + i);
        const double f = eval_component(comp, t);
        const double e = f - target.values[static_cast<size_t>(i)];
        const double w = 2.0 * e * f;
        ga += w * (-t * t);
        gb += w * t;
        gc += w;
    }
    return {ga, gb, gc};
}

Component fit_component(const Component& comp0, const TargetSeries& target,
                        const FitConfig& cfg) {
    cfg.validate();
    if (target.size() < 1) throw std::invalid_argument("fit_component: empty target");

    const FitScale scale = scale_for(target);
    ScaledParams theta = to_scaled(comp0, scale);
    double current = scaled_loss(theta, target, scale);
    if (!std::isfinite(current)) return comp0;

    double step = cfg.step_size;
    int stalled = 0;
    for (int it = 0; it < cfg.max_inner_iters; ++it) {
        const auto g = scaled_gradient(theta, target, scale);
        const double gnorm2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2)) break;

        bool accepted = false;
        double improvement = 0.0;
        while (step >= kMinStep) {
            const ScaledParams cand{theta.h - step * g[0], theta.p - step * g[1],
                                    theta.u - step * g[2]};
            const double cand_loss =
                representable(cand, scale)
                    ? scaled_loss(cand, target, scale)
                    : std::numeric_limits<double>::infinity();
            if (cand_loss < current) {
                improvement = (current - cand_loss) / std::max(current, kTiny);
                theta = cand;
                current = cand_loss;
                step = std::min(step * 1.3, kMaxStep);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // backtracking exhausted: local stationarity
        if (improvement < 1e-13) {
            if (++stalled >= 3) break;
        } else {
            stalled = 0;
        }
    }
    return from_scaled(theta, scale);
}

FitResult alternating_minimize(const Mixture& init, const CaseSeries& series,
                               const FitConfig& cfg) {
    cfg.validate();
    if (init.r() < 1) throw std::invalid_argument("alternating_minimize: empty mixture");

    FitResult result;
    result.mixture = init;
    result.loss_history.push_back(loss(result.mixture, series));

    for (int sweep = 0; sweep < cfg.max_outer_iters; ++sweep) {
        for (int k = 0; k < result.mixture.r(); ++k) {
            const TargetSeries target = residual_target(series, result.mixture, k);
            result.mixture.components[static_cast<size_t>(k)] =
                fit_component(result.mixture.components[static_cast<size_t>(k)], target, cfg);
        }
        const double prev = result.loss_history.back();
        const double cur = loss(result.mixture, series);
        result.loss_history.push_back(cur);
        result.outer_iters_used = sweep + 1;
        if ((prev - cur) / std::max(prev, kTiny) < cfg.loss_rel_tol) {
            result.converged = true;
            break;
        }
    }

    result.mixture.sort_components();
    result.mixture.loss = result.loss_history.back();
    result.mixture.bic = bic_score(result.mixture.r(), series.size(), result.mixture.loss);
    result.mixture.r_squared = r_squared(result.mixture, series);
    return result;
}

FitResult bic_select(const CaseSeries& series, const FitConfig& cfg,
                     const PeakConfig& peak_cfg) {
    cfg.validate();
    FitResult best;
    bool have_best = false;
    std::vector<std::pair<int, double>> scores;
    for (int r = 1; r <= cfg.r_max; ++r) {
        Mixture start;
        try {
            start = initialize(series, r, peak_cfg);
        } catch (const insufficient_peaks_error&) {
            continue;  // too little structure for this r
        }
        FitResult candidate = alternating_minimize(start, series, cfg);
        scores.emplace_back(r, candidate.mixture.bic);
        if (!have_best || candidate.mixture.bic < best.mixture.bic) {
            best = std::move(candidate);
            have_best = true;
        }
    }
    if (!have_best)
        throw std::runtime_error("bic_select: no candidate order could be fit");
    best.bic_scores = std::move(scores);
    return best;
}

std::vector<std::pair<int, double>> forecast(const Mixture& mix, int from_t, int horizon) {
    if (horizon < 0) throw std::invalid_argument("forecast: horizon must be >= 0");
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        const int t = from_t + h;
        out.emplace_back(t, mix.eval(static_cast<double>(t)));
    }
    return out;
}

double mape(const std::vector<double>& predicted, const std::vector<double>& actual) {
    if (predicted.size() != actual.size())
        throw std::invalid_argument("mape: length mismatch");
    if (predicted.empty()) throw std::invalid_argument("mape: empty input");
    std::vector<double> ape(predicted.size());
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (!(actual[i] > 0.0)) throw std::invalid_argument("mape: actual values must be > 0");
        ape[i] = std::abs(predicted[i] - actual[i]) / actual[i];
    }
    std::sort(ape.begin(), ape.end());
    const size_t n = ape.size();
    return n % 2 == 1 ? ape[n / 2] : 0.5 * (ape[n / 2 - 1] + ape[n / 2]);
}

}  // namespace epimix
