#pragma once

#include <stdexcept>
#include <vector>

#include "epimix/model.hpp"
#include "epimix/transform.hpp"

namespace epimix {

/// Raised when S(t) does not carry enough structure for the requested number
/// of mixture components (fewer than r-1 qualifying peaks).
struct insufficient_peaks_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Peak-finding knobs for the midpoint search on S(t).
struct PeakConfig {
    int min_distance = 14;        // minimum days between accepted peaks
    double min_prominence = 0.0;  // absolute prominence threshold on S values

    void validate() const {
        if (min_distance < 1)
            throw std::invalid_argument("PeakConfig: min_distance must be >= 1");
        if (!(min_prominence >= 0.0))
            throw std::invalid_argument("PeakConfig: min_prominence must be >= 0");
    }
};

/// Locations (time indices) of the r-1 most prominent strict local maxima of
/// S, sorted ascending. r = 1 yields an empty sequence. Peak finding runs on a
/// moving-average of S with window 2*min_distance + 1: the second difference
/// amplifies observation noise far above the inter-wave hump, and averaging
/// telescopes that noise away while peaks narrower than min_distance are not
/// meaningful midpoints anyway.
std::vector<int> find_midpoints(const STransform& st, int r, const PeakConfig& cfg);

/// Per-interval diagnostics from initialize.
struct InitInfo {
    std::vector<int> midpoints;
    std::vector<double> raw_curvatures;  // a_k before any clamping
    std::vector<int> clamped_intervals;  // 1-based interval ids where a_k <= 0
};

/// Closed-form initial mixture: partition the observation window at the S(t)
/// midpoints, then per interval estimate the curvature from the S average and
/// (M, C) from the interval maximum. Intervals that are not concave in log
/// (a_k <= 0) are clamped to a_min = 1e-6 and flagged in info.
Mixture initialize(const CaseSeries& series, int r, const PeakConfig& cfg,
                   InitInfo* info = nullptr);

}  // namespace epimix
