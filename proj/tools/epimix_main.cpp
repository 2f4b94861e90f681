#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "epimix/closedloop.hpp"
#include "epimix/fit.hpp"
#include "epimix/io.hpp"
#include "epimix/model.hpp"
#include "epimix/sim.hpp"
#include "epimix/theory.hpp"
#include "epimix/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;      // input / configuration errors
constexpr int kExitNumerical = 3;  // numerical failures

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream file(out_path);
    if (!file) throw std::invalid_argument("cannot open output file " + out_path);
    file << text;
}

void print_warnings(const epimix::IngestReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
}

struct FitArgs {
    std::string input, out;
    int r = 0;
    bool auto_r = false;
    int r_max = 4;
    int smooth = 1;
    double zero_floor = 1.0;
    uint64_t seed = 0;
};

int run_fit(const FitArgs& args) {
    epimix::IngestConfig icfg;
    icfg.smoothing_window = args.smooth;
    icfg.zero_floor = args.zero_floor;
    epimix::IngestReport report;
    epimix::CaseSeries series = [&] {
        try {
            return epimix::ingest(args.input, icfg, &report);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            std::exit(kExitInput);
        }
    }();
    print_warnings(report);

    epimix::FitConfig fcfg;
    fcfg.r_max = args.r_max;
    fcfg.seed = args.seed;
    epimix::PeakConfig pcfg;
    try {
        epimix::FitResult result;
        if (args.auto_r) {
            result = epimix::bic_select(series, fcfg, pcfg);
            for (const auto& [r, score] : result.bic_scores)
                std::cerr << "bic r=" << r << ": " << score << '\n';
        } else {
            const epimix::Mixture start = epimix::initialize(series, args.r, pcfg);
            result = epimix::alternating_minimize(start, series, fcfg);
        }
        emit(epimix::mixture_to_json(result.mixture), args.out);
    } catch (const std::exception& e) {
        std::cerr << "error: fit failed: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

struct ForecastArgs {
    std::string model, out;
    int horizon = 0;
    int from = 0;
};

int run_forecast(const ForecastArgs& args) {
    epimix::Mixture mix;
    try {
        std::ifstream file(args.model);
        if (!file) throw std::invalid_argument("cannot open model file " + args.model);
        std::ostringstream buf;
        buf << file.rdbuf();
        mix = epimix::mixture_from_json(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    std::ostringstream csv;
    epimix::write_forecast_csv(csv, epimix::forecast(mix, args.from, args.horizon));
    emit(csv.str(), args.out);
    return kExitOk;
}

struct SimArgs {
    std::string mode = "single", out;
    int64_t n = 100000;
    double d = 6.0, d_in = 55.2, d_out = 2e-5;
    double beta = 0.5, gamma = 0.9;
    int horizon = 15, trials = 1;
    uint64_t seed = 0;
};

int run_simulate(const SimArgs& args) {
    std::ostringstream csv;
    try {
        if (args.mode == "single") {
            epimix::SimConfigSingle cfg;
            cfg.n = args.n;
            cfg.d = args.d;
            cfg.beta = args.beta;
            cfg.gamma = args.gamma;
            cfg.horizon = args.horizon;
            cfg.seed = args.seed;
            cfg.validate();
            const auto ensemble = epimix::simulate_ensemble_single(cfg, args.trials);
            epimix::write_ensemble_csv(csv, ensemble);
            for (int t = 0; t <= cfg.horizon; ++t) {
                double mean = 0.0;
                for (const auto& traj : ensemble)
                    mean += static_cast<double>(traj.n1[static_cast<size_t>(t)]);
                mean /= static_cast<double>(ensemble.size());
                std::cout << "t=" << t << " mean=" << mean << " expected="
                          << epimix::expected_cases(cfg.d, cfg.beta, cfg.gamma, t) << '\n';
            }
        } else if (args.mode == "two") {
            epimix::SimConfigTwo cfg;
            cfg.n = args.n;
            cfg.d_in = args.d_in;
            cfg.d_out = args.d_out;
            cfg.beta = args.beta;
            cfg.gamma = args.gamma;
            cfg.horizon = args.horizon;
            cfg.seed = args.seed;
            cfg.validate();
            if (cfg.d_out > cfg.d_in)
                std::cerr << "warning: d_out > d_in (no community structure)\n";
            const auto ensemble = epimix::simulate_ensemble_two(cfg, args.trials);
            epimix::write_ensemble_csv(csv, ensemble);
            int crossed = 0;
            for (const auto& traj : ensemble)
                if (traj.crossing_time != epimix::Trajectory::kNever) ++crossed;
            for (int t = 0; t <= cfg.horizon; ++t) {
                double mean = 0.0;
                for (const auto& traj : ensemble)
                    mean += static_cast<double>(traj.n1[static_cast<size_t>(t)]);
                mean /= static_cast<double>(ensemble.size());
                std::cout << "t=" << t << " mean_n1=" << mean << " expected="
                          << epimix::expected_cases(cfg.d_in, cfg.beta, cfg.gamma, t)
                          << '\n';
            }
            std::cout << "crossed=" << crossed << "/" << args.trials << '\n';
        } else {
            std::cerr << "error: --mode must be single or two\n";
            return kExitInput;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    emit(csv.str(), args.out);
    return kExitOk;
}

struct BoundsArgs {
    double a1 = 0.0005, a2 = 0.0005, c1 = 50.0, c2 = 170.0;
    double m1 = 250000.0, m2 = 300000.0;
    double a_lower = 0.0005, m_upper = 300000.0, epsilon = 13000.0;
    double delta = 0.0;
    double ratio_eps = 0.05;  // the midpoint-detection overlap ratio
    int t_min = 0, t_max = 199;
    std::string out;
};

int run_bounds(const BoundsArgs& args) {
    try {
        const epimix::BoundsInput inp(args.a1, args.a2, args.c1, args.c2, args.m1, args.m2,
                                      args.a_lower, args.m_upper, args.epsilon,
                                      epimix::NoiseBound(args.delta));
        epimix::BoundsReport rep = epimix::check_theorem31(inp, {args.t_min, args.t_max});
        std::string json = epimix::bounds_report_to_json(rep);
        // Append the midpoint-separation threshold for the requested ratio eps.
        const double midpoint_sep =
            args.a1 == args.a2
                ? epimix::midpoint_separation_equal(args.a1, args.delta, args.ratio_eps)
                : epimix::midpoint_separation_unequal(args.a1, args.a2, args.m1, args.m2,
                                                      args.delta, args.ratio_eps);
        std::ostringstream tail;
        tail.precision(12);
        tail << ",\n  \"midpoint_separation\": " << midpoint_sep << "\n}";
        json.replace(json.rfind("\n}"), 2, tail.str());
        emit(json, args.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

struct PruningArgs {
    std::string input, dump_s;
    int start = 0, end = 0;
    int smooth = 1;
    double zero_floor = 1.0;
};

int run_pruning(const PruningArgs& args) {
    try {
        epimix::IngestConfig icfg;
        icfg.smoothing_window = args.smooth;
        icfg.zero_floor = args.zero_floor;
        epimix::IngestReport report;
        const epimix::CaseSeries series = epimix::ingest(args.input, icfg, &report);
        print_warnings(report);
        if (!args.dump_s.empty()) {
            std::ofstream file(args.dump_s);
            if (!file) throw std::invalid_argument("cannot open " + args.dump_s);
            epimix::write_stransform_csv(file, epimix::s_transform(series));
        }
        std::cout.precision(12);
        std::cout << epimix::estimate_pruning(series, args.start, args.end) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-mixture epidemic curves: fitting, bounds, and simulation"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a mixture to a case-count CSV");
    fit->add_option("--input", fit_args.input, "input CSV")->required();
    auto* opt_r = fit->add_option("--r", fit_args.r, "number of components");
    auto* opt_auto = fit->add_flag("--auto-r", fit_args.auto_r, "select r by BIC");
    fit->add_option("--r-max", fit_args.r_max, "BIC search bound")->default_val(4);
    fit->add_option("--smooth", fit_args.smooth, "odd smoothing window")->default_val(1);
    fit->add_option("--zero-floor", fit_args.zero_floor)->default_val(1.0);
    fit->add_option("--seed", fit_args.seed)->default_val(0);
    fit->add_option("--out", fit_args.out, "output JSON path (default stdout)");
    opt_r->excludes(opt_auto);

    ForecastArgs fc_args;
    auto* fc = app.add_subcommand("forecast", "Evaluate a fitted mixture forward");
    fc->add_option("--model", fc_args.model, "mixture JSON")->required();
    fc->add_option("--horizon", fc_args.horizon)->required();
    fc->add_option("--from", fc_args.from)->required();
    fc->add_option("--out", fc_args.out);

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Degree-pruning SIR ensembles");
    sim->add_option("--mode", sim_args.mode, "single|two")->default_val("single");
    sim->add_option("--n", sim_args.n)->default_val(100000);
    sim->add_option("--d", sim_args.d)->default_val(6.0);
    sim->add_option("--d-in", sim_args.d_in)->default_val(55.2);
    sim->add_option("--d-out", sim_args.d_out)->default_val(2e-5);
    sim->add_option("--beta", sim_args.beta)->default_val(0.5);
    sim->add_option("--gamma", sim_args.gamma)->default_val(0.9);
    sim->add_option("--horizon", sim_args.horizon)->default_val(15);
    sim->add_option("--trials", sim_args.trials)->default_val(1);
    sim->add_option("--seed", sim_args.seed)->default_val(0);
    sim->add_option("--out", sim_args.out, "ensemble CSV path")->required();

    BoundsArgs b_args;
    auto* bounds = app.add_subcommand("bounds", "Closed-form identifiability bounds");
    bounds->add_option("--a1", b_args.a1);
    bounds->add_option("--a2", b_args.a2);
    bounds->add_option("--c1", b_args.c1);
    bounds->add_option("--c2", b_args.c2);
    bounds->add_option("--m1", b_args.m1);
    bounds->add_option("--m2", b_args.m2);
    bounds->add_option("--a-lower", b_args.a_lower);
    bounds->add_option("--m-upper", b_args.m_upper);
    bounds->add_option("--epsilon", b_args.epsilon, "overlap bound in case units");
    bounds->add_option("--delta", b_args.delta, "noise bound");
    bounds->add_option("--ratio-eps", b_args.ratio_eps, "midpoint overlap ratio");
    bounds->add_option("--t-min", b_args.t_min);
    bounds->add_option("--t-max", b_args.t_max);
    bounds->add_option("--out", b_args.out);

    PruningArgs p_args;
    auto* pruning = app.add_subcommand("pruning", "Window-averaged pruning-rate estimate");
    pruning->add_option("--input", p_args.input)->required();
    pruning->add_option("--start", p_args.start)->required();
    pruning->add_option("--end", p_args.end)->required();
    pruning->add_option("--smooth", p_args.smooth)->default_val(1);
    pruning->add_option("--zero-floor", p_args.zero_floor)->default_val(1.0);
    pruning->add_option("--dump-s", p_args.dump_s, "write the S(t) transform CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (fit->parsed()) {
        if (!fit_args.auto_r && fit_args.r < 1) {
            std::cerr << "error: need --r >= 1 or --auto-r\n";
            return kExitInput;
        }
        return run_fit(fit_args);
    }
    if (fc->parsed()) return run_forecast(fc_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (bounds->parsed()) return run_bounds(b_args);
    if (pruning->parsed()) return run_pruning(p_args);
    return kExitInput;
}
