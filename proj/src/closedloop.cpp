#include "epimix/closedloop.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace epimix {

namespace {

constexpr double kPeakTol = 1e-12;

double radicand(double y, const ControlParams& p) {
    return p.b * p.b - 4.0 * p.a * (y - p.c);
}

struct Stepper {
    const ControlParams& p;
    double cap;
    bool ascending;
    int clamps = 0;

    double field(double y) const {
        const double r = radicand(y, p);
        const double root = std::sqrt(std::max(r, 0.0));
        return ascending ? root : -root;
    }

    double rk4(double y, double h) {
        auto eval = [&](double yy) {
            if (radicand(yy, p) < 0.0) ++clamps;
            return field(yy);
        };
        const double k1 = eval(y);
        const double k2 = eval(y + 0.5 * h * k1);
        const double k3 = eval(y + 0.5 * h * k2);
        const double k4 = eval(y + h * k3);
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

}  // namespace

double alpha_feedback(double infected, double max_log_seen, const ControlParams& p) {
    if (!(p.a > 0.0)) throw std::invalid_argument("alpha_feedback: requires a > 0");
    if (!(infected > 0.0)) throw std::invalid_argument("alpha_feedback: requires I > 0");
    double r = radicand(std::log(infected), p);
    if (r < 0.0) {
        // Rounding in log/exp can leave the radicand a hair below zero exactly
        // at the peak; anything beyond that is a genuine violation.
        if (r < -1e-12 * std::max(p.b * p.b, 1.0))
            throw std::domain_error("alpha_feedback: I above the trajectory's reachable set");
        r = 0.0;
    }
    const double root = std::sqrt(r);
    return max_log_seen < p.peak_log() - kPeakTol ? root : -root;
}

ClosedLoopResult integrate_closed_loop(const ControlParams& p, double t_end, double dt) {
    if (!(p.a > 0.0)) throw std::invalid_argument("integrate_closed_loop: requires a > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_closed_loop: requires dt > 0");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("integrate_closed_loop: requires t_end >= 0");

    const double cap = p.peak_log();
    const double sqrt_a = std::sqrt(p.a);
    // Within 4e-6 log-units of the cap (peak time +- 0.002/sqrt(a)) the
    // square-root field is too steep for RK4: errors born there are amplified
    // linearly by the expanding descent flow. Those steps advance by the
    // closed-form flow instead. The window never shrinks below one step.
    const double u_window = std::max(0.002 * 0.002, p.a * dt * dt);

    ClosedLoopResult out;
    Stepper stepper{p, cap, p.c < cap - kPeakTol, 0};
    double y = p.c;

    const auto record = [&](double t) {
        const double r = std::max(radicand(y, p), 0.0);
        const double alpha = stepper.ascending ? std::sqrt(r) : -std::sqrt(r);
        out.points.push_back({t, std::exp(y), alpha});
    };

    double t = 0.0;
    record(t);
    const long nsteps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    for (long i = 1; i <= nsteps; ++i) {
        const double t_next = std::min(t_end, static_cast<double>(i) * dt);
        const double h = t_next - t;
        const double u0 = std::max(cap - y, 0.0);
        if (u0 <= u_window) {
            // Closed-form flow of dy/dt = +-2 sqrt(a (cap - y)).
            if (stepper.ascending) {
                const double tau_touch = std::sqrt(u0 / p.a);
                if (tau_touch <= h) {
                    const double rem = h - tau_touch;
                    y = cap - p.a * rem * rem;
                    stepper.ascending = false;
                    out.peak_time = t + tau_touch;
                    ++out.sign_flips;
                } else {
                    const double su = std::sqrt(u0) - sqrt_a * h;
                    y = cap - su * su;
                }
            } else {
                const double su = std::sqrt(u0) + sqrt_a * h;
                y = cap - su * su;
            }
        } else {
            y = stepper.rk4(y, h);
            if (y > cap) y = cap;  // fp guard; the exact flow never crosses
        }
        t = t_next;
        record(t);
    }
    out.radicand_clamps = stepper.clamps;
    return out;
}

}  // namespace epimix
