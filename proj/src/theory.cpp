#include "epimix/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace epimix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string("BoundsInput: ") + name + " must be > 0");
    return x;
}

// 2 cosh(2 a s): the e^{2a(C1-C2)} + e^{-2a(C1-C2)} term, symmetric in sign.
double cosh_term(double a, double separation) {
    return 2.0 * std::cosh(2.0 * a * separation);
}

double noise_log_factor(double noise_bound) {
    if (!(noise_bound >= 0.0 && noise_bound < 1.0))
        throw std::invalid_argument("noise bound must lie in [0, 1)");
    return std::log((1.0 + noise_bound) / (1.0 - noise_bound));
}
}  // namespace

BoundsInput::BoundsInput(double a1_, double a2_, double c1_, double c2_, double m1_,
                         double m2_, double a_lower_, double m_upper_, double epsilon_,
                         NoiseBound noise_)
    : a1(require_positive(a1_, "a1")),
      a2(require_positive(a2_, "a2")),
      c1(c1_),
      c2(c2_),
      m1(require_positive(m1_, "M1")),
      m2(require_positive(m2_, "M2")),
      a_lower(require_positive(a_lower_, "a_lower")),
      m_upper(require_positive(m_upper_, "M_upper")),
      epsilon(require_positive(epsilon_, "epsilon")),
      noise(noise_) {
    if (!(c1 <= c2)) throw std::invalid_argument("BoundsInput: requires C1 <= C2");
}

double separation_threshold(double a_lower, double m_upper, double epsilon) {
    require_positive(a_lower, "a_lower");
    if (!(epsilon > 0.0 && epsilon <= m_upper))
        throw std::invalid_argument("separation_threshold: requires 0 < epsilon <= M");
    return 2.0 * std::sqrt(std::log(m_upper / epsilon) / a_lower);
}

double separation_threshold_log10(double a_lower, double m_upper, double epsilon) {
    require_positive(a_lower, "a_lower");
    if (!(epsilon > 0.0 && epsilon <= m_upper))
        throw std::invalid_argument("separation_threshold: requires 0 < epsilon <= M");
    return 2.0 * std::sqrt(std::log10(m_upper / epsilon) / a_lower);
}

double delta_star(const BoundsInput& inp) {
    if (std::abs(inp.a1 - inp.a2) > 1e-9 * std::max(inp.a1, inp.a2))
        throw std::invalid_argument("delta_star: stated for the equal-curvature regime");
    const double m_min = std::min(inp.m1, inp.m2);
    if (!(inp.epsilon < m_min))
        throw std::invalid_argument("delta_star: requires epsilon < min(M1, M2)");
    const double k = cosh_term(inp.a1, inp.c1 - inp.c2) - 2.0;
    const double num = 1.0 + 0.25 * k;
    const double den = 1.0 + inp.epsilon / (m_min - inp.epsilon) * k;
    const double val = (std::pow(num / den, 0.2) - 1.0) / 4.0;
    return std::min(std::max(val, 0.0), 0.25);
}

double ratio_st_upper_equal(double a1, double separation, double noise_bound, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("ratio_st_upper_equal: requires 0 <= eps <= 1");
    return -2.0 * a1 +
           std::log(1.0 + cosh_term(a1, separation) * eps + eps * eps) +
           2.0 * noise_log_factor(noise_bound);
}

double ratio_st_lower_midpoint_equal(double a1, double separation, double noise_bound) {
    return -2.0 * a1 + std::log((2.0 + cosh_term(a1, separation)) / 4.0) -
           2.0 * noise_log_factor(noise_bound);
}

double midpoint_separation_equal(double a1, double noise_bound, double eps) {
    require_positive(a1, "a1");
    const double phi = std::pow((1.0 + noise_bound) / (1.0 - noise_bound), 4.0);
    const double cap = 0.25 / phi;  // (1/4)((1-B)/(1+B))^4
    if (!(eps >= 0.0 && eps <= cap))
        throw std::invalid_argument("midpoint_separation_equal: eps outside [0, (1/4)((1-B)/(1+B))^4]");
    const double num = 4.0 * phi * (1.0 + eps * eps) - 2.0;
    const double den = 1.0 - 4.0 * phi * eps;
    return std::log(num / den) / (2.0 * a1);
}

double midpoint_separation_unequal(double a1, double a2, double m1, double m2,
                                   double noise_bound, double eps) {
    require_positive(a1, "a1");
    require_positive(a2, "a2");
    if (a1 == a2)
        throw std::invalid_argument("midpoint_separation_unequal: requires a1 != a2");
    const double phi = std::pow((1.0 + noise_bound) / (1.0 - noise_bound), 4.0);
    const double cap = std::pow((1.0 - noise_bound) / (1.0 + noise_bound), 8.0) / 16.0;
    if (!(eps >= 0.0 && eps <= cap))
        throw std::invalid_argument(
            "midpoint_separation_unequal: eps outside [0, (1/16)((1-B)/(1+B))^8]");
    const double num = 4.0 * phi * (std::max(std::exp(a2 - a1), std::exp(a1 - a2)) + eps) -
                       std::exp(a2 - a1) + std::exp(a1 - a2);
    const double den = 1.0 - 4.0 * phi * std::sqrt(eps);
    if (!(num > 0.0) || !(den > 0.0))
        throw std::domain_error(
            "midpoint_separation_unequal: condition not expressible for these parameters");
    const double half_log = 0.5 * std::log(num / den);
    const double radicand = (half_log * half_log + (a2 - a1) * std::log(m1 / m2)) / (a1 * a2);
    if (!(radicand >= 0.0))
        throw std::domain_error(
            "midpoint_separation_unequal: condition not expressible for these parameters");
    return std::sqrt(radicand);
}

std::pair<double, double> ratio_to_time(const Component& first, const Component& second,
                                        double ratio) {
    const double a1 = first.a(), a2 = second.a();
    if (a1 == a2)
        throw std::invalid_argument("ratio_to_time: degenerate quadratic (a1 == a2); "
                                    "use the linear closed form instead");
    if (!(ratio > 0.0)) throw std::invalid_argument("ratio_to_time: ratio must be > 0");
    const double c1 = first.peak_time(), c2 = second.peak_time();
    const double log_rm = std::log(ratio) + std::log(first.peak_height()) -
                          std::log(second.peak_height());  // log(R M1 / M2)
    const double disc = a1 * a2 * (c1 - c2) * (c1 - c2) - (a2 - a1) * log_rm;
    if (!(disc >= 0.0))
        throw std::domain_error("ratio_to_time: negative discriminant, no real solution");
    const double root = std::sqrt(disc);
    const double t_a = (-(a1 * c1 - a2 * c2) + root) / (a2 - a1);
    const double t_b = (-(a1 * c1 - a2 * c2) - root) / (a2 - a1);
    return {std::min(t_a, t_b), std::max(t_a, t_b)};
}

BoundsReport check_theorem31(const BoundsInput& inp, std::pair<int, int> t_range) {
    BoundsReport rep;
    rep.separation_required = separation_threshold(inp.a_lower, inp.m_upper, inp.epsilon);
    rep.separation_required_log10 =
        separation_threshold_log10(inp.a_lower, inp.m_upper, inp.epsilon);
    rep.separation_actual = std::abs(inp.c1 - inp.c2);
    rep.delta_star = delta_star(inp);

    const double m_min = std::min(inp.m1, inp.m2);
    rep.assumptions_hold[0] = inp.m1 <= inp.m_upper && inp.m2 <= inp.m_upper &&
                              inp.epsilon < m_min / 5.0;
    rep.assumptions_hold[1] = inp.a1 >= inp.a_lower && inp.a2 >= inp.a_lower;
    rep.assumptions_hold[2] = rep.separation_actual >= rep.separation_required;
    rep.separation_holds_log10 = rep.separation_actual >= rep.separation_required_log10;
    rep.assumptions_hold[3] = inp.noise.delta <= rep.delta_star;
    rep.assumptions_hold[4] = inp.c1 >= t_range.first && inp.c1 <= t_range.second &&
                              inp.c2 >= t_range.first && inp.c2 <= t_range.second;
    rep.all_hold = std::all_of(rep.assumptions_hold.begin(), rep.assumptions_hold.end(),
                               [](bool ok) { return ok; });

    const double delta = inp.noise.delta;
    const double shrink = (1.0 - delta) / (1.0 + delta);
    const std::array<double, 2> a_k{inp.a1, inp.a2};
    const std::array<double, 2> m_k{inp.m1, inp.m2};
    const std::array<double, 2> c_k{inp.c1, inp.c2};
    for (int k = 0; k < 2; ++k) {
        const double frac = std::ceil(c_k[k]) - c_k[k];
        const double grid_factor = std::exp(-a_k[k] * frac * frac);
        rep.m_hat_lower[k] = m_k[k] * (1.0 - delta) * grid_factor;
        rep.m_hat_upper[k] = (m_k[k] + inp.epsilon) * (1.0 + delta);
        const double denom = m_k[k] * grid_factor * shrink - inp.epsilon;
        rep.c_hat_radius[k] =
            denom > 0.0 ? std::sqrt(std::log(m_k[k] / denom) / a_k[k]) : kInf;
    }

    rep.notes = rep.assumptions_hold[2] == rep.separation_holds_log10
                    ? ""
                    : "separation verdict differs between natural-log and log10 readings "
                      "of the threshold, both values reported";
    return rep;
}

std::string bounds_report_to_json(const BoundsReport& rep) {
    nlohmann::json j;
    j["separation_required"] = rep.separation_required;
    j["separation_required_log10"] = rep.separation_required_log10;
    j["separation_actual"] = rep.separation_actual;
    j["delta_star"] = rep.delta_star;
    j["assumptions_hold"] = rep.assumptions_hold;
    j["separation_holds_log10"] = rep.separation_holds_log10;
    j["all_hold"] = rep.all_hold;
    j["m_hat_lower"] = rep.m_hat_lower;
    j["m_hat_upper"] = rep.m_hat_upper;
    j["c_hat_radius"] = rep.c_hat_radius;
    j["notes"] = rep.notes;
    return j.dump(2);
}

}  // namespace epimix
