#include "epimix/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epimix/fit.hpp"

namespace epimix {

namespace {

constexpr double kCurvatureFloor = 1e-6;

// Least-squares quadratic coefficient of log N over [lo, hi]. On a pure
// Gaussian segment log N is exactly -a t^2 + b t + c, so this recovers a
// exactly, like the average of second differences it replaces, but the noise
// enters through every point of the window instead of the two ends.
double lsq_log_curvature(const CaseSeries& series, int lo, int hi) {
    const int m = hi - lo + 1;
    if (m < 3) return 0.0;
    const double center = 0.5 * (lo + hi);
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double sy = 0, sdy = 0, sddy = 0;
    for (int t = lo; t <= hi; ++t) {
        const double d = static_cast<double>(t) - center;
        const double d2 = d * d;
        const double y = std::log(series.at_time(t));
        s1 += d;
        s2 += d2;
        s3 += d * d2;
        s4 += d2 * d2;
        sy += y;
        sdy += d * y;
        sddy += d2 * y;
    }
    const double n = static_cast<double>(m);
    // normal equations for y ~ c0 + c1 d + c2 d^2 (s1 = s3 = 0 when symmetric)
    const double det = n * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * s3 - s2 * s2);
    if (det == 0.0) return 0.0;
    const double c2 = (n * (s2 * sddy - s3 * sdy) - s1 * (s1 * sddy - s2 * sdy) +
                       sy * (s1 * s3 - s2 * s2)) /
                      det;
    return c2;
}

struct PeakCandidate {
    int index = 0;  // index into the (smoothed) S array
    double prominence = 0.0;
};

// Standard prominence: height above the higher of the two bases, where each
// base is the minimum between the peak and the nearest strictly higher value
// (or the array edge).
double prominence_at(const std::vector<double>& s, int i) {
    const int n = static_cast<int>(s.size());
    double left_min = s[i];
    for (int j = i - 1; j >= 0; --j) {
        if (s[j] > s[i]) break;
        left_min = std::min(left_min, s[j]);
    }
    double right_min = s[i];
    for (int j = i + 1; j < n; ++j) {
        if (s[j] > s[i]) break;
        right_min = std::min(right_min, s[j]);
    }
    return s[i] - std::max(left_min, right_min);
}

}  // namespace

std::vector<int> find_midpoints(const STransform& st, int r, const PeakConfig& cfg) {
    cfg.validate();
    if (r < 1) throw std::invalid_argument("find_midpoints: r must be >= 1");
    if (st.values.empty()) throw std::invalid_argument("find_midpoints: empty transform");
    if (r == 1) return {};

    const int smooth_window = 2 * cfg.min_distance + 1;
    const std::vector<double> s = moving_average(st.values, smooth_window);
    const int n = static_cast<int>(s.size());

    // Rounding dust on an analytically constant S must not count as structure.
    double s_scale = 0.0;
    for (double v : s) s_scale = std::max(s_scale, std::abs(v));
    const double dust_floor = 1e-10 * (1.0 + s_scale);

    std::vector<PeakCandidate> cands;
    for (int i = 1; i + 1 < n; ++i) {
        if (s[i] > s[i - 1] && s[i] > s[i + 1]) {
            const double prom = prominence_at(s, i);
            if (prom >= cfg.min_prominence && prom > dust_floor) cands.push_back({i, prom});
        }
    }
    // Most prominent first; earlier index wins ties.
    std::sort(cands.begin(), cands.end(), [](const PeakCandidate& x, const PeakCandidate& y) {
        if (x.prominence != y.prominence) return x.prominence > y.prominence;
        return x.index < y.index;
    });
    // Residual observation noise still leaves shallow wiggles behind; peaks an
    // order of magnitude less prominent than the leading one are not wave
    // boundaries, they are that residue.
    if (!cands.empty()) {
        const double relative_floor = 0.2 * cands.front().prominence;
        std::erase_if(cands, [&](const PeakCandidate& cand) {
            return cand.prominence < relative_floor;
        });
    }
    std::vector<PeakCandidate> kept;
    for (const auto& cand : cands) {
        const bool crowded =
            std::any_of(kept.begin(), kept.end(), [&](const PeakCandidate& k) {
                return std::abs(k.index - cand.index) < cfg.min_distance;
            });
        if (!crowded) kept.push_back(cand);
    }
    if (static_cast<int>(kept.size()) < r - 1)
        throw insufficient_peaks_error("find_midpoints: found " +
                                       std::to_string(kept.size()) + " qualifying peaks, need " +
                                       std::to_string(r - 1) +
                                       " (insufficient structure for requested r)");
    kept.resize(static_cast<size_t>(r - 1));
    std::vector<int> midpoints;
    midpoints.reserve(kept.size());
    for (const auto& k : kept) midpoints.push_back(st.t_first + k.index);
    std::sort(midpoints.begin(), midpoints.end());
    return midpoints;
}

Mixture initialize(const CaseSeries& series, int r, const PeakConfig& cfg, InitInfo* info) {
    const STransform st = s_transform(series);
    // The midpoint search runs on the transform of a lightly averaged copy of
    // the counts: multiplicative noise enters S through a handful of boundary
    // terms, so denoising the counts first and the transform afterwards
    // attenuates it by both window lengths while the wide inter-wave hump is
    // barely touched. Curvature averaging below still uses the raw transform.
    cfg.validate();
    const int n_window = cfg.min_distance + 1 - cfg.min_distance % 2;  // odd, ~min_distance
    const CaseSeries denoised(series.t0(), moving_average(series.values(), n_window));
    const std::vector<int> midpoints = find_midpoints(s_transform(denoised), r, cfg);

    std::vector<int> x(static_cast<size_t>(r) + 1);
    x[0] = series.t0();
    x[static_cast<size_t>(r)] = series.t_last();
    for (int k = 1; k < r; ++k) x[static_cast<size_t>(k)] = midpoints[static_cast<size_t>(k - 1)];

    if (info) {
        info->midpoints = midpoints;
        info->raw_curvatures.clear();
        info->clamped_intervals.clear();
    }

    Mixture mix;
    for (int k = 1; k <= r; ++k) {
        const int lo = x[static_cast<size_t>(k - 1)];
        const int hi = x[static_cast<size_t>(k)];

        // Curvature of log N over the interval. The average of the defined
        // second differences equals the least-squares quadratic coefficient on
        // exact Gaussian segments, and the regression form keeps observation
        // noise from concentrating in the two boundary terms the telescoping
        // sum otherwise reduces to.
        double a_k = -lsq_log_curvature(series, lo, hi);
        if (info) info->raw_curvatures.push_back(a_k);
        if (!(a_k > 0.0)) {
            a_k = kCurvatureFloor;
            if (info) info->clamped_intervals.push_back(k);
        }

        double m_k = -std::numeric_limits<double>::infinity();
        int c_k = lo;
        for (int t = lo; t <= hi; ++t) {
            const double v = series.at_time(t);
            if (v > m_k) {
                m_k = v;
                c_k = t;
            }
        }
        mix.components.push_back(from_peak_form(m_k, static_cast<double>(c_k), a_k));
    }

    mix.sort_components();
    mix.loss = loss(mix, series);
    mix.bic = bic_score(r, series.size(), mix.loss);
    mix.r_squared = r_squared(mix, series);
    return mix;
}

}  // namespace epimix
