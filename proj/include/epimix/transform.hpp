#pragma once

#include <array>
#include <vector>

#include "epimix/model.hpp"

namespace epimix {

/// Log second difference S(t) = log N(t+1)/N(t) - log N(t)/N(t-1), defined on
/// the interior of the observation window. For a single pure Gaussian the
/// transform is the constant -2a; where two waves overlap it spikes.
struct STransform {
    int t_first = 0;             // first defined index, t0 + 1
    std::vector<double> values;  // S(t) for t in [t_first, t_first + size - 1]

    int size() const { return static_cast<int>(values.size()); }
    int t_last() const { return t_first + size() - 1; }
    double at_time(int t) const { return values.at(static_cast<size_t>(t - t_first)); }
};

STransform s_transform(const CaseSeries& series);

/// Case ratio R(t) = M2 e^{-a2 (t-C2)^2} / (M1 e^{-a1 (t-C1)^2}); first is the
/// earlier outbreak (denominator), second the later one (numerator).
double case_ratio(const Component& first, const Component& second, double t);

/// log R(t), computed without forming either exponential.
double log_case_ratio(const Component& first, const Component& second, double t);

/// Closed form for S(t) of a two-component mixture in terms of the case ratio,
/// including the multiplicative noise terms (eta_{t-1}, eta_t, eta_{t+1}).
/// With zero noise this is identically equal to s_transform of the noiseless
/// mixture at interior t.
double st_from_ratio(const Component& first, const Component& second, double t,
                     const std::array<double, 3>& eta);

/// Window-averaged S over [t_start, t_end]: the log geometric mean of the
/// time-varying pruning rates (an estimate of log gamma). Requires the window
/// to lie inside the defined S range.
double estimate_pruning(const CaseSeries& series, int t_start, int t_end);

/// Centered moving average with truncated windows at the boundaries.
/// window must be odd and >= 1; window == 1 is the identity.
std::vector<double> moving_average(const std::vector<double>& x, int window);

}  // namespace epimix
