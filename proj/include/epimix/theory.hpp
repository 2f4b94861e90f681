#pragma once

#include <array>
#include <string>
#include <utility>

#include "epimix/model.hpp"

namespace epimix {

/// Inputs to the closed-form identifiability bounds: the two-component mixture
/// parameters, the uniform bounds (a, M) they are measured against, the
/// overlap budget epsilon, and the noise bound delta (alias B).
struct BoundsInput {
    double a1, a2;        // curvatures, > 0
    double c1, c2;        // peak times, c1 <= c2
    double m1, m2;        // peak heights, > 0
    double a_lower;       // uniform lower bound on curvatures
    double m_upper;       // uniform upper bound on peak heights
    double epsilon;       // overlap bound, > 0 (case units)
    NoiseBound noise;     // |eta_t| <= delta

    BoundsInput(double a1_, double a2_, double c1_, double c2_, double m1_, double m2_,
                double a_lower_, double m_upper_, double epsilon_, NoiseBound noise_);
};

/// Outcome of evaluating the five identifiability assumptions plus the implied
/// estimate brackets for (M_k, C_k).
struct BoundsReport {
    double separation_required = 0.0;        // natural-log threshold
    double separation_required_log10 = 0.0;  // same expression under log10
    double separation_actual = 0.0;
    double delta_star = 0.0;
    std::array<bool, 5> assumptions_hold{};  // natural-log reading of assumption 3
    bool separation_holds_log10 = false;
    bool all_hold = false;
    // Estimate brackets implied when the assumptions hold, per component:
    // m_lower_k <= M_hat_k <= m_upper_k and |C_hat_k - C_k| <= c_radius_k.
    std::array<double, 2> m_hat_lower{}, m_hat_upper{}, c_hat_radius{};
    std::string notes;
};

/// Temporal separation threshold 2 sqrt((1/a) log(M/eps)), natural log.
double separation_threshold(double a_lower, double m_upper, double epsilon);
/// Same expression under base-10 log (the reading consistent with the worked
/// 105-day example; reported side by side, never silently substituted).
double separation_threshold_log10(double a_lower, double m_upper, double epsilon);

/// Maximum admissible noise amplitude delta* for midpoint detection in the
/// equal-curvature regime. Always in [0, 1/4].
double delta_star(const BoundsInput& inp);

/// Upper bound on S(t) in the single-component-dominant regions
/// (R <= eps or R >= 1/eps), equal curvatures.
double ratio_st_upper_equal(double a1, double separation, double noise_bound, double eps);

/// Lower bound on S at the R = 1 midpoint, equal curvatures.
double ratio_st_lower_midpoint_equal(double a1, double separation, double noise_bound);

/// Separation above which the S-argmax has case ratio within [eps, 1/eps],
/// equal curvatures. Admissible range: 0 <= eps <= (1/4)((1-B)/(1+B))^4.
double midpoint_separation_equal(double a1, double noise_bound, double eps);

/// The unequal-curvature analogue. Admissible range:
/// 0 <= eps <= (1/16)((1-B)/(1+B))^8; requires a1 != a2.
double midpoint_separation_unequal(double a1, double a2, double m1, double m2,
                                   double noise_bound, double eps);

/// The two real times at which the case ratio equals R (quadratic in t when
/// a1 != a2). Throws when the discriminant is negative or a1 == a2.
std::pair<double, double> ratio_to_time(const Component& first, const Component& second,
                                        double ratio);

/// Evaluates all five assumptions against [t_range.first, t_range.second] and
/// fills in the implied estimate brackets.
BoundsReport check_theorem31(const BoundsInput& inp, std::pair<int, int> t_range);

/// BoundsReport as a JSON object (CLI surface).
std::string bounds_report_to_json(const BoundsReport& rep);

}  // namespace epimix
