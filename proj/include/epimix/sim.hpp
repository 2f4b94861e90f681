#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace epimix {

/// Single-community degree-pruning SIR process. Edges form between an infected
/// and a susceptible node with probability (d/n) gamma^t at epoch t, infection
/// crosses an edge with probability beta, and infected nodes recover after one
/// epoch.
struct SimConfigSingle {
    int64_t n = 100000;   // population size
    double d = 6.0;       // mean-degree parameter before any pruning
    double beta = 0.5;    // infection probability per contact
    double gamma = 0.9;   // per-epoch edge retention (pruning rate)
    int horizon = 15;     // epochs simulated
    uint64_t seed = 0;

    void validate() const;
};

/// Two-community stochastic block model. Community 2 starts its pruning clock
/// only once its first node is infected; cross-community edges use d_out.
struct SimConfigTwo {
    int64_t n = 10000;  // nodes per community
    double d_in = 55.2;
    double d_out = 2e-5;
    double beta = 0.5;
    double gamma = 0.9;
    int horizon = 12;
    uint64_t seed = 0;

    void validate() const;
};

struct Trajectory {
    static constexpr int kNever = -1;

    std::vector<int64_t> n1;      // infected counts, t = 0..horizon
    std::vector<int64_t> n2;      // empty for single-community runs
    int crossing_time = kNever;   // first epoch with an infection in community 2
};

/// Deterministic per-trial random stream derived from (seed, trial).
std::mt19937_64 rng_stream(uint64_t seed, uint64_t trial);

/// Per-susceptible infection probability 1 - (1 - d beta gamma^t / n)^infected.
double step_infection_probability(int64_t infected, int t, const SimConfigSingle& cfg);

/// One transition of the single-community chain: given the current susceptible
/// count and infected count at epoch t, draws the number of new infections
/// Binomial(susceptible, step_infection_probability).
int64_t step_single(int64_t susceptible, int64_t infected, int t,
                    const SimConfigSingle& cfg, std::mt19937_64& rng);

Trajectory simulate_single(const SimConfigSingle& cfg, uint64_t trial = 0);
Trajectory simulate_two(const SimConfigTwo& cfg, uint64_t trial = 0);

std::vector<Trajectory> simulate_ensemble_single(const SimConfigSingle& cfg, int trials);
std::vector<Trajectory> simulate_ensemble_two(const SimConfigTwo& cfg, int trials);

/// Expected infections (d beta)^t gamma^{t(t-1)/2} in the large-n limit.
double expected_cases(double d, double beta, double gamma, int t);

/// Continuous-time maximizer of expected_cases: -log(d beta / sqrt(gamma)) / log(gamma).
/// Requires d beta > sqrt(gamma), otherwise there is no growth phase.
double peak_time_c1(double d, double beta, double gamma);

struct ConcentrationBound {
    double threshold;   // exp((1/2 log g) t^2 + log(d b / sqrt g)(1+eps) t)
    double prob_lower;  // 1 - sum_{s<t} exp(-min(eps^2, eps) d b g^s / 4)
};

ConcentrationBound concentration_bound(double d, double beta, double gamma, double eps, int t);

/// Evaluation of the three sufficient conditions under which the first
/// cross-community infection is late with probability >= 1 - 2 delta, plus the
/// guaranteed crossing threshold and the (a, M) the resulting curve maps to.
struct CrossingReport {
    double c1 = 0.0;
    double threshold = 0.0;   // c1 - log 20 / log(1/gamma)
    double prob_floor = 0.0;  // 1 - 2 delta
    double dout_bound = 0.0;
    bool cond_c1 = false;
    bool cond_dout = false;
    bool cond_n = false;
    double corollary_a = 0.0;
    double corollary_m = 0.0;

    bool all_hold() const { return cond_c1 && cond_dout && cond_n; }
};

CrossingReport crossing_bound_check(const SimConfigTwo& cfg, double delta);

}  // namespace epimix
