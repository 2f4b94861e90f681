#include "epimix/model.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"

namespace epimix {

namespace {
constexpr double kMaxExponent = 700.0;  // exp(709.8) overflows a double
}

CaseSeries::CaseSeries(int t0, std::vector<double> values)
    : t0_(t0), values_(std::move(values)) {
    if (values_.size() < 3)
        throw std::invalid_argument("CaseSeries: need at least 3 observations");
    for (size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
            throw std::invalid_argument("CaseSeries: value at index " + std::to_string(i) +
                                        " is not strictly positive");
    }
}

Component::Component(double a, double b, double c) : a_(a), b_(b), c_(c) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("Component: curvature a must be > 0");
    if (!std::isfinite(b) || !std::isfinite(c))
        throw std::invalid_argument("Component: b and c must be finite");
    const double log_peak = c + b * b / (4.0 * a);
    if (!(log_peak <= kMaxExponent))
        throw std::overflow_error("Component: peak height exceeds representable range");
}

double eval_component(const Component& comp, double t) {
    const double expo = (-comp.a() * t + comp.b()) * t + comp.c();
    if (expo < -kMaxExponent) return 0.0;
    if (expo > kMaxExponent)
        throw std::overflow_error("eval_component: exponent above representable range");
    return std::exp(expo);
}

PeakForm to_peak_form(const Component& comp) {
    return PeakForm{comp.peak_height(), comp.peak_time(), comp.a()};
}

Component from_peak_form(double peak_height, double peak_time, double curvature) {
    if (!(peak_height > 0.0))
        throw std::invalid_argument("from_peak_form: peak height must be > 0");
    if (!(curvature > 0.0))
        throw std::invalid_argument("from_peak_form: curvature must be > 0");
    const double b = 2.0 * peak_time * curvature;
    const double c = std::log(peak_height) - peak_time * peak_time * curvature;
    return Component(curvature, b, c);
}

double Mixture::eval(double t) const {
    double total = 0.0;
    for (const auto& comp : components) total += eval_component(comp, t);
    return total;
}

void Mixture::sort_components() {
    std::stable_sort(components.begin(), components.end(),
                     [](const Component& lhs, const Component& rhs) {
                         return lhs.peak_time() < rhs.peak_time();
                     });
}

std::string mixture_to_json(const Mixture& m) {
    nlohmann::json j;
    j["r"] = m.r();
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& comp : m.components) {
        comps.push_back({{"a", comp.a()},
                         {"b", comp.b()},
                         {"c", comp.c()},
                         {"peak_height", comp.peak_height()},
                         {"peak_time", comp.peak_time()}});
    }
    j["components"] = std::move(comps);
    j["loss"] = m.loss;
    j["bic"] = m.bic;
    j["r_squared"] = m.r_squared;
    return j.dump(2);
}

Mixture mixture_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Mixture m;
    for (const auto& jc : j.at("components")) {
        m.components.emplace_back(jc.at("a").get<double>(), jc.at("b").get<double>(),
                                  jc.at("c").get<double>());
    }
    if (j.contains("r") && j.at("r").get<int>() != m.r())
        throw std::invalid_argument("mixture_from_json: r does not match component count");
    if (m.components.empty())
        throw std::invalid_argument("mixture_from_json: at least one component required");
    m.loss = j.value("loss", 0.0);
    m.bic = j.value("bic", 0.0);
    m.r_squared = j.value("r_squared", 0.0);
    m.sort_components();
    return m;
}

}  // namespace epimix
