#include "epimix/sim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace epimix {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// (1 - p)^k without cancellation for small p.
double pow_one_minus(double p, double k) {
    if (k <= 0.0) return 1.0;
    return std::exp(k * std::log1p(-p));
}

int64_t draw_binomial(std::mt19937_64& rng, int64_t trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    std::binomial_distribution<int64_t> dist(trials, p);
    return dist(rng);
}

void check_common(int64_t n, double beta, double gamma, int horizon) {
    if (n < 1) throw std::invalid_argument("sim: population must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("sim: beta must lie in (0, 1]");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("sim: gamma must lie in (0, 1)");
    if (horizon < 0) throw std::invalid_argument("sim: horizon must be >= 0");
}

}  // namespace

void SimConfigSingle::validate() const {
    check_common(n, beta, gamma, horizon);
    if (!(d > 0.0)) throw std::invalid_argument("sim: d must be > 0");
    // Edge probability d beta gamma^t / n peaks at t = 0.
    if (d * beta / static_cast<double>(n) > 1.0)
        throw std::invalid_argument("sim: d * beta / n must be <= 1 (edge probability)");
}

void SimConfigTwo::validate() const {
    check_common(n, beta, gamma, horizon);
    if (!(d_in > 0.0) || !(d_out >= 0.0))
        throw std::invalid_argument("sim: require d_in > 0 and d_out >= 0");
    if (d_in * beta / static_cast<double>(n) > 1.0 ||
        d_out * beta / static_cast<double>(n) > 1.0)
        throw std::invalid_argument("sim: d * beta / n must be <= 1 (edge probability)");
    if (static_cast<double>(n) < 2.0 * beta * d_out)
        throw std::invalid_argument("sim: requires n >= 2 beta d_out");
}

std::mt19937_64 rng_stream(uint64_t seed, uint64_t trial) {
    const uint64_t state = splitmix64(splitmix64(seed) ^ splitmix64(trial + 1));
    return std::mt19937_64(state);
}

double step_infection_probability(int64_t infected, int t, const SimConfigSingle& cfg) {
    if (infected <= 0) return 0.0;
    const double p_pair =
        cfg.d * cfg.beta * std::pow(cfg.gamma, t) / static_cast<double>(cfg.n);
    if (p_pair >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(infected) * std::log1p(-p_pair));
}

int64_t step_single(int64_t susceptible, int64_t infected, int t,
                    const SimConfigSingle& cfg, std::mt19937_64& rng) {
    if (infected <= 0 || susceptible <= 0) return 0;
    return draw_binomial(rng, susceptible, step_infection_probability(infected, t, cfg));
}

Trajectory simulate_single(const SimConfigSingle& cfg, uint64_t trial) {
    cfg.validate();
    std::mt19937_64 rng = rng_stream(cfg.seed, trial);

    Trajectory traj;
    traj.n1.resize(static_cast<size_t>(cfg.horizon) + 1, 0);
    traj.n1[0] = 1;
    int64_t susceptible = cfg.n - 1;
    for (int t = 0; t < cfg.horizon; ++t) {
        const int64_t fresh = step_single(susceptible, traj.n1[static_cast<size_t>(t)], t,
                                          cfg, rng);
        susceptible -= fresh;
        traj.n1[static_cast<size_t>(t) + 1] = fresh;
    }
    return traj;
}

Trajectory simulate_two(const SimConfigTwo& cfg, uint64_t trial) {
    cfg.validate();
    std::mt19937_64 rng = rng_stream(cfg.seed, trial);
    const double n = static_cast<double>(cfg.n);

    Trajectory traj;
    traj.n1.resize(static_cast<size_t>(cfg.horizon) + 1, 0);
    traj.n2.resize(static_cast<size_t>(cfg.horizon) + 1, 0);
    traj.n1[0] = 1;
    int64_t s1 = cfg.n - 1;
    int64_t s2 = cfg.n;

    for (int t = 0; t < cfg.horizon; ++t) {
        const int64_t i1 = traj.n1[static_cast<size_t>(t)];
        const int64_t i2 = traj.n2[static_cast<size_t>(t)];
        const bool crossed = traj.crossing_time != Trajectory::kNever;
        const int local_clock = crossed ? t - traj.crossing_time : 0;

        // Probability a given susceptible node escapes every infected node this
        // epoch. Community 2 (and back-infection into community 1) runs on the
        // pruning clock started at the crossing time.
        const double g_t = std::pow(cfg.gamma, t);
        const double g_local = crossed ? std::pow(cfg.gamma, local_clock) : 0.0;

        double escape1 = pow_one_minus(cfg.beta * cfg.d_in * g_t / n,
                                       static_cast<double>(i1));
        if (crossed)
            escape1 *= pow_one_minus(cfg.beta * cfg.d_out * g_local / n,
                                     static_cast<double>(i2));

        double escape2 = pow_one_minus(cfg.beta * cfg.d_out * g_t / n,
                                       static_cast<double>(i1));
        if (crossed)
            escape2 *= pow_one_minus(cfg.beta * cfg.d_in * g_local / n,
                                     static_cast<double>(i2));

        const int64_t fresh1 = draw_binomial(rng, s1, 1.0 - escape1);
        const int64_t fresh2 = draw_binomial(rng, s2, 1.0 - escape2);
        s1 -= fresh1;
        s2 -= fresh2;
        traj.n1[static_cast<size_t>(t) + 1] = fresh1;
        traj.n2[static_cast<size_t>(t) + 1] = fresh2;
        if (!crossed && fresh2 > 0) traj.crossing_time = t + 1;
    }
    return traj;
}

std::vector<Trajectory> simulate_ensemble_single(const SimConfigSingle& cfg, int trials) {
    std::vector<Trajectory> out;
    out.reserve(static_cast<size_t>(trials));
    for (int i = 0; i < trials; ++i)
        out.push_back(simulate_single(cfg, static_cast<uint64_t>(i)));
    return out;
}

std::vector<Trajectory> simulate_ensemble_two(const SimConfigTwo& cfg, int trials) {
    std::vector<Trajectory> out;
    out.reserve(static_cast<size_t>(trials));
    for (int i = 0; i < trials; ++i)
        out.push_back(simulate_two(cfg, static_cast<uint64_t>(i)));
    return out;
}

double expected_cases(double d, double beta, double gamma, int t) {
    if (t < 0) throw std::invalid_argument("expected_cases: t must be >= 0");
    return std::pow(d * beta, t) * std::pow(gamma, 0.5 * t * (t - 1));
}

double peak_time_c1(double d, double beta, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("peak_time_c1: gamma must lie in (0, 1)");
    const double growth = d * beta / std::sqrt(gamma);
    if (!(growth >= 1.0))
        throw std::domain_error("peak_time_c1: d beta < sqrt(gamma), no growth phase");
    return -std::log(growth) / std::log(gamma);
}

ConcentrationBound concentration_bound(double d, double beta, double gamma, double eps,
                                       int t) {
    if (!(eps > 0.0)) throw std::invalid_argument("concentration_bound: eps must be > 0");
    if (t < 0) throw std::invalid_argument("concentration_bound: t must be >= 0");
    ConcentrationBound out;
    out.threshold = std::exp(0.5 * std::log(gamma) * t * t +
                             std::log(d * beta / std::sqrt(gamma)) * (1.0 + eps) * t);
    double tail = 0.0;
    const double eps_min = std::min(eps * eps, eps);
    for (int s = 0; s < t; ++s)
        tail += std::exp(-eps_min * d * beta * std::pow(gamma, s) / 4.0);
    out.prob_lower = 1.0 - tail;
    return out;
}

CrossingReport crossing_bound_check(const SimConfigTwo& cfg, double delta) {
    cfg.validate();
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("crossing_bound_check: delta must lie in (0, 1/2)");

    CrossingReport rep;
    rep.c1 = peak_time_c1(cfg.d_in, cfg.beta, cfg.gamma);
    const double log_inv_gamma = std::log(1.0 / cfg.gamma);
    rep.threshold = rep.c1 - std::log(20.0) / log_inv_gamma;
    rep.prob_floor = 1.0 - 2.0 * delta;

    rep.cond_c1 =
        rep.c1 < delta * std::exp(5.0 * std::sqrt(cfg.gamma)) + std::log(20.0) / log_inv_gamma;

    const double t_star_real =
        -std::log(cfg.d_in * cfg.beta / (20.0 * std::sqrt(cfg.gamma))) / std::log(cfg.gamma);
    const int t_star = static_cast<int>(std::floor(t_star_real));
    if (t_star < 1) {
        rep.dout_bound = std::numeric_limits<double>::infinity();  // empty sum
    } else {
        double acc = 0.0;
        for (int s = 0; s < t_star; ++s)
            acc += std::pow(2.0 * cfg.d_in * cfg.beta, s) *
                   std::pow(cfg.gamma, 0.5 * s * (s + 1));
        rep.dout_bound = std::log(1.0 / (1.0 - delta)) / (2.0 * cfg.beta * acc);
    }
    rep.cond_dout = cfg.d_out <= rep.dout_bound;
    rep.cond_n = static_cast<double>(cfg.n) >= 2.0 * cfg.beta * cfg.d_out;

    rep.corollary_a = 0.5 * log_inv_gamma;
    const double lg = std::log(cfg.d_in * cfg.beta / std::sqrt(cfg.gamma));
    rep.corollary_m = std::exp(0.5 * lg * lg / log_inv_gamma);
    return rep;
}

}  // namespace epimix
