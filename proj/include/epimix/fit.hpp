#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "epimix/init.hpp"
#include "epimix/model.hpp"

namespace epimix {

struct FitConfig {
    int max_outer_iters = 200;   // alternating sweeps
    int max_inner_iters = 500;   // gradient steps per component refit
    double step_size = 0.25;     // initial step in the scaled parameterization
    double loss_rel_tol = 1e-8;  // relative loss improvement per sweep to keep going
    int r_max = 4;               // BIC search bound
    uint64_t seed = 0;           // reserved for randomized restarts

    void validate() const;
};

struct FitResult {
    Mixture mixture;
    int outer_iters_used = 0;
    bool converged = false;
    std::vector<double> loss_history;  // initial loss, then one entry per sweep; nonincreasing
    std::vector<std::pair<int, double>> bic_scores;  // (r, BIC) per candidate, bic_select only
};

/// Residual target N(t) - N_{-k}(t) for a single-component refit. Unlike a
/// CaseSeries its values may be zero or negative.
struct TargetSeries {
    int t0 = 0;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Sum of squared residuals of the mixture against the series (the l2 objective).
double loss(const Mixture& mix, const CaseSeries& series);

/// 1 - loss / sum (N - mean N)^2.
double r_squared(const Mixture& mix, const CaseSeries& series);

/// 3 r ln T + T ln(L/T): the Gaussian-likelihood information criterion used
/// for order selection.
double bic_score(int r, int num_obs, double loss_value);

/// Residual target for component k (0-based): series minus every other component.
TargetSeries residual_target(const CaseSeries& series, const Mixture& mix, int k);

/// Analytic gradient of the single-component squared loss at comp, in (a, b, c).
std::array<double, 3> loss_gradient_single(const Component& comp, const TargetSeries& target);

/// Gradient descent with backtracking line search from comp0 against the
/// residual target. Never returns a component with larger loss than comp0;
/// positivity of the curvature is maintained by optimizing its log.
Component fit_component(const Component& comp0, const TargetSeries& target,
                        const FitConfig& cfg);

/// Cyclic single-component refits until the relative loss improvement over a
/// sweep drops below loss_rel_tol or max_outer_iters is reached. The loss
/// history is nonincreasing by construction.
FitResult alternating_minimize(const Mixture& init, const CaseSeries& series,
                               const FitConfig& cfg);

/// Fits r = 1..r_max (skipping r where the midpoint search finds too little
/// structure) and returns the BIC minimizer; ties go to the smaller r.
/// All candidate scores are reported in bic_scores.
FitResult bic_select(const CaseSeries& series, const FitConfig& cfg,
                     const PeakConfig& peak_cfg);

/// Mixture evaluations at t = from_t + 1 .. from_t + horizon.
std::vector<std::pair<int, double>> forecast(const Mixture& mix, int from_t, int horizon);

/// Median absolute percent error. Requires equal lengths and positive actuals.
double mape(const std::vector<double>& predicted, const std::vector<double>& actual);

}  // namespace epimix
