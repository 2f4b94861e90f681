#include "epimix/transform.hpp"

#include <algorithm>
#include <cmath>

namespace epimix {

STransform s_transform(const CaseSeries& series) {
    const auto& v = series.values();
    STransform st;
    st.t_first = series.t0() + 1;
    st.values.resize(v.size() - 2);
    for (size_t i = 1; i + 1 < v.size(); ++i) {
        st.values[i - 1] = std::log(v[i + 1]) - 2.0 * std::log(v[i]) + std::log(v[i - 1]);
    }
    return st;
}

double log_case_ratio(const Component& first, const Component& second, double t) {
    const double d2 = t - second.peak_time();
    const double d1 = t - first.peak_time();
    // Grouped so that swapping the arguments negates the result exactly.
    return (std::log(second.peak_height()) - std::log(first.peak_height())) +
           (first.a() * d1 * d1 - second.a() * d2 * d2);
}

double case_ratio(const Component& first, const Component& second, double t) {
    return std::exp(log_case_ratio(first, second, t));
}

namespace {

// log(1 + e^x) without overflow
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// log(e^{x0} + e^{x1} + e^{x2} + e^{x3})
double logsumexp4(double x0, double x1, double x2, double x3) {
    const double m = std::max(std::max(x0, x1), std::max(x2, x3));
    return m + std::log(std::exp(x0 - m) + std::exp(x1 - m) + std::exp(x2 - m) +
                        std::exp(x3 - m));
}

}  // namespace

double st_from_ratio(const Component& first, const Component& second, double t,
                     const std::array<double, 3>& eta) {
    const double a1 = first.a();
    const double a2 = second.a();
    const double da = a1 - a2;
    const double L = log_case_ratio(first, second, t);
    // Ratio of decay factors between the two components at offset +-1:
    // g = log( e^{-2a1(t-C1)} / e^{-2a2(t-C2)} ).
    const double g = -2.0 * a1 * (t - first.peak_time()) + 2.0 * a2 * (t - second.peak_time());
    // The bracket equals
    //   (1 + (R e^{da})^2)/(1+R)^2 + R/(1+R)^2 (e^g + e^{-g}) e^{da},
    // evaluated here as logsumexp(0, 2(L+da), L+da+g, L+da-g) - 2 log(1+R)
    // so the tails (R -> 0 or R -> inf) stay finite.
    const double log_bracket =
        logsumexp4(0.0, 2.0 * (L + da), L + da + g, L + da - g) - 2.0 * softplus(L);
    const double noise = std::log1p(eta[2]) + std::log1p(eta[0]) - 2.0 * std::log1p(eta[1]);
    return -2.0 * a1 + log_bracket + noise;
}

double estimate_pruning(const CaseSeries& series, int t_start, int t_end) {
    const int lo = series.t0() + 1;
    const int hi = series.t_last() - 1;
    if (t_start > t_end)
        throw std::invalid_argument("estimate_pruning: empty window (t_start > t_end)");
    if (t_start < lo || t_end > hi)
        throw std::invalid_argument("estimate_pruning: window outside the defined S range [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const STransform st = s_transform(series);
    double acc = 0.0;
    for (int t = t_start; t <= t_end; ++t) acc += st.at_time(t);
    return acc / static_cast<double>(t_end - t_start + 1);
}

std::vector<double> moving_average(const std::vector<double>& x, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("moving_average: window must be odd and >= 1");
    if (window == 1) return x;
    const int n = static_cast<int>(x.size());
    const int half = window / 2;
    std::vector<double> out(x.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (int j = lo; j <= hi; ++j) acc += x[j];
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace epimix
