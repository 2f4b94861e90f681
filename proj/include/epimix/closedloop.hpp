#pragma once

#include <cmath>
#include <vector>

namespace epimix {

/// Exponent coefficients of the target trajectory e^{-at^2+bt+c}; the cap
/// c + b^2/(4a) is the log of the peak infection level the feedback allows.
struct ControlParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double peak_log() const { return c + b * b / (4.0 * a); }
};

/// Feedback growth rate alpha = +-sqrt(b^2 - 4a(log I - c)): positive while the
/// running max of log I is below the cap, negative afterwards. Throws when I
/// lies above the trajectory's reachable set (negative radicand).
double alpha_feedback(double infected, double max_log_seen, const ControlParams& p);

struct ClosedLoopPoint {
    double t;
    double infected;
    double alpha;
};

struct ClosedLoopResult {
    std::vector<ClosedLoopPoint> points;
    double peak_time = std::numeric_limits<double>::quiet_NaN();
    int sign_flips = 0;
    int radicand_clamps = 0;  // fp events where the radicand dipped below zero
};

/// Integrates dI/dt = alpha(I) I from I(0) = e^c with fixed-step RK4, carried
/// in log I. The vector field has a square-root touch at the peak where RK4
/// alone stalls on the spurious constant branch, so steps near the touch are
/// advanced with the local closed-form flow of the feedback dynamics and the
/// sign flips exactly at the touch; RK4 handles everything else. Feedback at
/// RK4 stages uses the pre-step sign.
ClosedLoopResult integrate_closed_loop(const ControlParams& p, double t_end, double dt);

}  // namespace epimix
