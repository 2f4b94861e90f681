#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "epimix/sim.hpp"

using namespace epimix;

namespace {

SimConfigSingle base_single() {
    SimConfigSingle cfg;
    cfg.n = 100000;
    cfg.d = 6.0;
    cfg.beta = 0.5;
    cfg.gamma = 0.9;
    cfg.horizon = 15;
    cfg.seed = 0;
    return cfg;
}

SimConfigTwo paper_example_two() {
    SimConfigTwo cfg;
    cfg.n = 10000;
    cfg.d_in = 55.2;
    cfg.d_out = 2e-5;
    cfg.beta = 0.5;
    cfg.gamma = 0.9;
    cfg.horizon = 12;
    cfg.seed = 0;
    return cfg;
}

double mean_n1(const std::vector<Trajectory>& ensemble, int t) {
    double acc = 0.0;
    for (const auto& traj : ensemble)
        acc += static_cast<double>(traj.n1[static_cast<size_t>(t)]);
    return acc / static_cast<double>(ensemble.size());
}

}  // namespace

TEST_CASE("step probability: zero infected is absorbing, half-life case is exact") {
    SimConfigSingle cfg = base_single();
    CHECK(step_infection_probability(0, 3, cfg) == 0.0);
    std::mt19937_64 rng(1);
    CHECK(step_single(1000, 0, 3, cfg, rng) == 0);

    // d = n, beta = 1, gamma = 0.5: after one pruning epoch the pair
    // probability is exactly 1/2, and with a single infected node so is the
    // per-susceptible infection probability.
    SimConfigSingle exact;
    exact.n = 100;
    exact.d = 100.0;
    exact.beta = 1.0;
    exact.gamma = 0.5;
    exact.horizon = 2;
    CHECK(step_infection_probability(1, 1, exact) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("conditional step mean matches the binomial and respects the growth bound") {
    SimConfigSingle cfg = base_single();
    const int64_t susceptible = 99000;
    const int64_t infected = 50;
    const int t = 2;
    const double p = step_infection_probability(infected, t, cfg);
    const double exact_mean = static_cast<double>(susceptible) * p;
    const double bound =
        static_cast<double>(infected) * cfg.d * cfg.beta * std::pow(cfg.gamma, t);

    std::mt19937_64 rng = rng_stream(7, 0);
    const int draws = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = static_cast<double>(step_single(susceptible, infected, t, cfg, rng));
        acc += x;
        acc2 += x * x;
    }
    const double mean = acc / draws;
    const double var = acc2 / draws - mean * mean;
    const double se = std::sqrt(var / draws);
    CHECK(std::abs(mean - exact_mean) <= 3.0 * se);
    CHECK(mean <= bound + 3.0 * se);
}

TEST_CASE("simulate_single: horizon zero, determinism, conservation, absorption") {
    SimConfigSingle cfg = base_single();
    cfg.horizon = 0;
    const Trajectory t0 = simulate_single(cfg);
    REQUIRE(t0.n1.size() == 1);
    CHECK(t0.n1[0] == 1);

    cfg.horizon = 25;
    const Trajectory a = simulate_single(cfg, 3);
    const Trajectory b = simulate_single(cfg, 3);
    CHECK(a.n1 == b.n1);
    const Trajectory c = simulate_single(cfg, 4);
    CHECK(a.n1 != c.n1);  // distinct trial streams

    int64_t cumulative = 0;
    bool extinct = false;
    for (int64_t count : a.n1) {
        CHECK(count >= 0);
        if (extinct) CHECK(count == 0);
        if (count == 0) extinct = true;
        cumulative += count;
    }
    CHECK(cumulative <= cfg.n);
}

TEST_CASE("increasing d or beta stochastically increases the first generation") {
    SimConfigSingle lo = base_single();
    lo.horizon = 1;
    SimConfigSingle hi_d = lo;
    hi_d.d = 8.0;
    SimConfigSingle hi_b = lo;
    hi_b.beta = 0.7;
    const int trials = 10000;
    const double m_lo = mean_n1(simulate_ensemble_single(lo, trials), 1);
    const double m_hd = mean_n1(simulate_ensemble_single(hi_d, trials), 1);
    const double m_hb = mean_n1(simulate_ensemble_single(hi_b, trials), 1);
    // binomial-ish SE of the mean is ~ sqrt(m / trials) ~ 0.02
    CHECK(m_hd - m_lo > 3.0 * 0.03);
    CHECK(m_hb - m_lo > 3.0 * 0.03);
}

TEST_CASE("expected cases closed form") {
    CHECK(expected_cases(6.0, 0.5, 0.9, 0) == 1.0);
    CHECK(expected_cases(6.0, 0.5, 0.9, 1) == doctest::Approx(3.0).epsilon(1e-15));
    // log expected_cases is a quadratic with second difference log gamma
    for (int t = 1; t <= 14; ++t) {
        const double second_diff = std::log(expected_cases(6.0, 0.5, 0.9, t + 1)) -
                                   2.0 * std::log(expected_cases(6.0, 0.5, 0.9, t)) +
                                   std::log(expected_cases(6.0, 0.5, 0.9, t - 1));
        CHECK(second_diff == doctest::Approx(std::log(0.9)).epsilon(1e-9));
    }
}

TEST_CASE("peak time of the expected curve") {
    CHECK(peak_time_c1(55.2, 0.5, 0.9) ==
          doctest::Approx(31.990124663950937).epsilon(1e-12));
    CHECK(std::abs(peak_time_c1(55.2, 0.5, 0.9) - 32.0) <= 0.1);
    // d beta = sqrt(gamma): the peak sits at zero
    CHECK(peak_time_c1(std::sqrt(0.9) / 0.5, 0.5, 0.9) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(peak_time_c1(1.0, 0.5, 0.9), std::domain_error);

    // continuous peak dominates both neighboring integers
    const double c1 = peak_time_c1(6.0, 0.5, 0.9);
    const double at_peak =
        std::exp(0.5 * std::log(0.9) * c1 * c1 + std::log(3.0 / std::sqrt(0.9)) * c1);
    CHECK(expected_cases(6.0, 0.5, 0.9, static_cast<int>(std::floor(c1))) <= at_peak);
    CHECK(expected_cases(6.0, 0.5, 0.9, static_cast<int>(std::ceil(c1))) <= at_peak);
}

TEST_CASE("concentration bound bookkeeping") {
    const ConcentrationBound at0 = concentration_bound(6.0, 0.5, 0.9, 0.5, 0);
    CHECK(at0.prob_lower == 1.0);  // empty sum
    double prev = at0.prob_lower;
    for (int t = 1; t <= 10; ++t) {
        const ConcentrationBound cb = concentration_bound(6.0, 0.5, 0.9, 0.5, t);
        CHECK(cb.prob_lower < prev);
        prev = cb.prob_lower;
    }
    const ConcentrationBound ref = concentration_bound(6.0, 0.5, 0.9, 0.5, 8);
    CHECK(ref.threshold == doctest::Approx(34336.83820292519).epsilon(1e-9));
    CHECK(ref.prob_lower == doctest::Approx(-6.003908443975773).epsilon(1e-9));
}

TEST_CASE("simulate_two: no cross edges means no crossing, plus determinism") {
    SimConfigTwo cfg = paper_example_two();
    cfg.d_out = 0.0;
    for (uint64_t trial = 0; trial < 10; ++trial) {
        const Trajectory traj = simulate_two(cfg, trial);
        CHECK(traj.crossing_time == Trajectory::kNever);
        for (int64_t v : traj.n2) CHECK(v == 0);
    }

    SimConfigTwo live = paper_example_two();
    live.d_out = 0.05;
    const Trajectory a = simulate_two(live, 5);
    const Trajectory b = simulate_two(live, 5);
    CHECK(a.n1 == b.n1);
    CHECK(a.n2 == b.n2);
    CHECK(a.crossing_time == b.crossing_time);
}

TEST_CASE("simulate_two conservation per community") {
    SimConfigTwo cfg = paper_example_two();
    cfg.d_out = 0.1;  // force plenty of crossings
    for (uint64_t trial = 0; trial < 20; ++trial) {
        const Trajectory traj = simulate_two(cfg, trial);
        const int64_t total1 = std::accumulate(traj.n1.begin(), traj.n1.end(), int64_t{0});
        const int64_t total2 = std::accumulate(traj.n2.begin(), traj.n2.end(), int64_t{0});
        CHECK(total1 <= cfg.n);
        CHECK(total2 <= cfg.n);
        if (traj.crossing_time != Trajectory::kNever) {
            for (int t = 0; t < traj.crossing_time; ++t)
                CHECK(traj.n2[static_cast<size_t>(t)] == 0);
            CHECK(traj.n2[static_cast<size_t>(traj.crossing_time)] > 0);
        }
    }
}

TEST_CASE("community 2 restarts the expected curve on its own clock") {
    // Mild cross coupling: condition on a crossing with a single index case and
    // compare community 2 against the single-community expectation shifted to
    // its own clock. First-order cross-infection leakage is added to the
    // tolerance.
    SimConfigTwo cfg;
    cfg.n = 200000;
    cfg.d_in = 6.0;
    cfg.d_out = 0.02;
    cfg.beta = 0.5;
    cfg.gamma = 0.9;
    cfg.horizon = 12;
    const int trials = 6000;
    const int k_max = 2;

    std::vector<double> sums(static_cast<size_t>(k_max) + 1, 0.0);
    std::vector<double> sq(static_cast<size_t>(k_max) + 1, 0.0);
    std::vector<double> n1_at(static_cast<size_t>(k_max) + 1, 0.0);
    int kept = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const Trajectory traj = simulate_two(cfg, static_cast<uint64_t>(trial));
        const int T = traj.crossing_time;
        if (T == Trajectory::kNever || T + k_max > cfg.horizon) continue;
        if (traj.n2[static_cast<size_t>(T)] != 1) continue;
        ++kept;
        for (int k = 0; k <= k_max; ++k) {
            const double v = static_cast<double>(traj.n2[static_cast<size_t>(T + k)]);
            sums[static_cast<size_t>(k)] += v;
            sq[static_cast<size_t>(k)] += v * v;
            n1_at[static_cast<size_t>(k)] +=
                static_cast<double>(traj.n1[static_cast<size_t>(T + k)]);
        }
    }
    REQUIRE(kept > 500);
    for (int k = 1; k <= k_max; ++k) {
        const double mean = sums[static_cast<size_t>(k)] / kept;
        const double var = sq[static_cast<size_t>(k)] / kept - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / kept);
        // cross-infection leakage: each of the ~n1 infected in community 1
        // seeds community 2 at rate beta d_out gamma^t <= beta d_out, and the
        // earlier leaks grow by at most d_in beta per epoch
        double leakage = 0.0;
        for (int j = 0; j < k; ++j)
            leakage += cfg.beta * cfg.d_out * (n1_at[static_cast<size_t>(j)] / kept) *
                       std::pow(cfg.d_in * cfg.beta, k - 1 - j);
        const double expected = expected_cases(cfg.d_in, cfg.beta, cfg.gamma, k);
        CHECK(mean >= expected - 3.0 * se - leakage);
        CHECK(mean <= expected + 3.0 * se + leakage);
    }
}

TEST_CASE("crossing bound check on the reference example") {
    const SimConfigTwo cfg = paper_example_two();
    const CrossingReport rep = crossing_bound_check(cfg, 0.05);
    CHECK(rep.cond_c1);
    CHECK(rep.cond_dout);
    CHECK(rep.cond_n);
    CHECK(rep.all_hold());
    CHECK(rep.c1 == doctest::Approx(31.990124663950937).epsilon(1e-12));
    CHECK(rep.threshold == doctest::Approx(3.5569658582075334).epsilon(1e-12));
    CHECK(std::abs(rep.threshold - 3.57) <= 0.02);
    CHECK(rep.prob_floor == doctest::Approx(0.9));
    CHECK(rep.dout_bound == doctest::Approx(2.2576550580421934e-05).epsilon(1e-9));

    SimConfigTwo doubled = cfg;
    doubled.d_out = 2.0 * cfg.d_out;
    CHECK_FALSE(crossing_bound_check(doubled, 0.05).cond_dout);

    CHECK(rep.corollary_a == doctest::Approx(0.052680257828913175).epsilon(1e-12));
    CHECK(rep.corollary_m == doctest::Approx(2.5904638685269225e+23).epsilon(1e-9));
}
