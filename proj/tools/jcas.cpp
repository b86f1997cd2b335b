// Command-line front end: region sweeps, the channel's rate and exponent
// formulas, self-verification suites, and the classical discrimination
// simulator. Data goes to --out or stdout; diagnostics go to stderr.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "jcas/io.hpp"
#include "jcas/mc.hpp"
#include "jcas/region.hpp"
#include "jcas/scenario.hpp"
#include "jcas/verify.hpp"

namespace {

struct CommonArgs {
    jcas::ChannelParams params;
    double n_s = 0.0;
    double n_m = 0.0;
    std::string ea_mode = "closed";
    std::string ua_mode = "bound";
    int dims = 24;
    double tail_eps = 1e-9;
    std::string out_path;
    std::string config_path;
};

// Bad flags, keys, or values; maps to the usage exit code.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_channel_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--eta", args.params.eta, "Channel transmissivity, in (0,1]")
        ->capture_default_str();
    cmd->add_option("--n-th", args.params.n_th, "Background thermal photons in the return, > 0")
        ->capture_default_str();
    cmd->add_option("--n", args.params.n_total, "Photon budget per mode, >= 0")
        ->capture_default_str();
    cmd->add_option("--config", args.config_path,
                    "Flat key=value config file; flags take precedence");
}

// Applies a flat key=value file to the command's flags. Keys name flags
// without the leading dashes; values given on the command line win. CLI11
// only consults its own config machinery on the top-level app, so the
// subcommand files are handed through each option's parser here instead.
void apply_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = CLI::detail::trim_copy(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw usage_error("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = CLI::detail::trim_copy(text.substr(0, eq));
        const std::string value = CLI::detail::trim_copy(text.substr(eq + 1));
        CLI::Option* opt = key.empty() ? nullptr : cmd->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw usage_error("config key '" + key + "' does not match a flag of this command");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw usage_error("config key '" + key + "': " + e.what());
        }
    }
}

void add_mode_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--ea-mode", args.ea_mode, "Assisted rate: closed form or exact Fock")
        ->check(CLI::IsMember({"closed", "fock"}))
        ->capture_default_str();
    cmd->add_option("--ua-mode", args.ua_mode, "Unassisted rate: closed bound or exact Fock")
        ->check(CLI::IsMember({"bound", "fock"}))
        ->capture_default_str();
    cmd->add_option("--dims", args.dims, "Truncation dimension for exact assisted rate")
        ->capture_default_str();
    cmd->add_option("--tail-eps", args.tail_eps, "Tail mass tolerance for exact unassisted rate")
        ->capture_default_str();
}

jcas::CombineOptions make_options(const CommonArgs& args) {
    jcas::CombineOptions opt;
    opt.ea_mode = args.ea_mode == "fock" ? jcas::EaRateMode::fock : jcas::EaRateMode::closed;
    opt.ua_mode = args.ua_mode == "fock" ? jcas::UaRateMode::fock : jcas::UaRateMode::bound;
    opt.ea_dims = args.dims;
    opt.ua_tail_eps = args.tail_eps;
    return opt;
}

void emit(const std::string& out_path, const std::string& data) {
    if (out_path.empty()) {
        std::cout << data;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + out_path);
    file << data;
}

std::vector<std::pair<std::string, std::string>> channel_json_params(const CommonArgs& args) {
    return {{"eta", jcas::fmt17(args.params.eta)},
            {"n_th", jcas::fmt17(args.params.n_th)},
            {"n", jcas::fmt17(args.params.n_total)}};
}

int run_verify(const std::string& suite) {
    std::vector<jcas::CheckResult> checks;
    if (suite == "gaussian")
        checks = jcas::verify_gaussian();
    else if (suite == "chernoff")
        checks = jcas::verify_chernoff();
    else if (suite == "fock")
        checks = jcas::verify_fock();
    else if (suite == "region")
        checks = jcas::verify_region();
    else
        checks = jcas::verify_all();
    int failures = 0;
    for (const jcas::CheckResult& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name
                  << " measured=" << jcas::fmt17(c.measured) << " bound=" << jcas::fmt17(c.bound)
                  << "\n";
        if (!c.passed) ++failures;
    }
    if (failures > 0) throw std::runtime_error(std::to_string(failures) + " check(s) failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Communication-rate / sensing-exponent tradeoff calculator for a lossy "
                 "thermal-noise bosonic channel"};
    app.require_subcommand(1);

    CommonArgs region_args, exp_args, rate_args, sim_args;
    double exp_lambda = 0.0, rate_lambda = 0.0;
    int lambda_grid = 101, split_grid = 51;
    std::string suite = "all";
    std::vector<int> copies = {16, 24, 32, 40, 48, 56};
    std::vector<long long> trials = {100000};
    std::uint64_t seed = 1;
    int positions = 2;

    CLI::App* region = app.add_subcommand("region", "Sweep the achievable (rate, exponent) region");
    add_channel_flags(region, region_args);
    add_mode_flags(region, region_args);
    region->add_option("--lambda-grid", lambda_grid, "Time-share grid size, >= 2")
        ->capture_default_str();
    region->add_option("--split-grid", split_grid, "Power-split grid size, >= 2")
        ->capture_default_str();
    region->add_option("--out", region_args.out_path, "CSV output path (default stdout)");

    CLI::App* exponents =
        app.add_subcommand("exponents", "Print sensing error exponents, exact and approximate");
    add_channel_flags(exponents, exp_args);
    exponents->add_option("--n-s", exp_args.n_s, "Source photons for the assisted probe")
        ->capture_default_str();
    exponents->add_option("--n-m", exp_args.n_m, "Displacement power for the assisted probe")
        ->capture_default_str();
    CLI::Option* exp_lambda_opt = exponents->add_option(
        "--lambda", exp_lambda, "Also print the combined exponent at this time share, in [0,1]");
    exponents->add_option("--out", exp_args.out_path, "Output path (default stdout)");

    CLI::App* rates = app.add_subcommand("rates", "Print communication rates");
    add_channel_flags(rates, rate_args);
    add_mode_flags(rates, rate_args);
    rates->add_option("--n-s", rate_args.n_s, "Source photons of the unassisted split")
        ->capture_default_str();
    rates->add_option("--n-m", rate_args.n_m, "Displacement power of the unassisted split")
        ->capture_default_str();
    CLI::Option* rate_lambda_opt = rates->add_option(
        "--lambda", rate_lambda, "Also print the combined rate at this time share, in [0,1]");
    rates->add_option("--out", rate_args.out_path, "Output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "Run self-check suites");
    verify->add_option("--suite", suite, "Suite to run")
        ->check(CLI::IsMember({"gaussian", "chernoff", "fock", "region", "all"}))
        ->capture_default_str();

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte-Carlo discrimination of position hypotheses");
    add_channel_flags(simulate, sim_args);
    simulate->add_option("--positions", positions, "Number of position hypotheses, >= 2")
        ->capture_default_str();
    simulate->add_option("--copies", copies, "Copy counts to simulate")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--trials", trials, "Trials per copy count (single value broadcasts)")
        ->delimiter(',')
        ->capture_default_str();
    simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
    simulate->add_option("--out", sim_args.out_path, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        apply_config(region, region_args.config_path);
        apply_config(exponents, exp_args.config_path);
        apply_config(rates, rate_args.config_path);
        apply_config(simulate, sim_args.config_path);
        if (app.got_subcommand(region)) {
            const jcas::RegionResult result = jcas::build_region(
                region_args.params, lambda_grid, split_grid, make_options(region_args));
            const auto baseline = jcas::time_sharing_baseline(region_args.params, lambda_grid);
            const jcas::DominanceReport rep = jcas::dominance_report(result.frontier, baseline);
            emit(region_args.out_path, jcas::region_csv(result));
            auto params = channel_json_params(region_args);
            params.push_back({"lambda_grid", std::to_string(lambda_grid)});
            params.push_back({"split_grid", std::to_string(split_grid)});
            params.push_back({"witness_lambda", jcas::fmt17(rep.witness.lambda)});
            params.push_back({"witness_n_s", jcas::fmt17(rep.witness.n_s)});
            params.push_back({"witness_n_m", jcas::fmt17(rep.witness.n_m)});
            params.push_back({"clipped", rep.clipped ? "true" : "false"});
            if (!region_args.out_path.empty())
                std::cout << jcas::json_scalar("dominance_margin", rep.max_margin, "nats", params)
                          << "\n";
        } else if (app.got_subcommand(exponents)) {
            const auto params = channel_json_params(exp_args);
            auto split_params = params;
            split_params.push_back({"n_s", jcas::fmt17(exp_args.n_s)});
            split_params.push_back({"n_m", jcas::fmt17(exp_args.n_m)});
            jcas::ResourceSplit split{0.0, exp_args.n_s, exp_args.n_m};
            std::string data;
            data += jcas::json_scalar("incoherent_probe_exponent_exact",
                                      jcas::e_nqi(exp_args.params), "nats_per_copy", params) + "\n";
            data += jcas::json_scalar("incoherent_probe_exponent_approx",
                                      jcas::e_nqi(exp_args.params, jcas::EvalMode::approx),
                                      "nats_per_copy", params) + "\n";
            data += jcas::json_scalar("assisted_ranging_exponent_exact",
                                      jcas::e_qi_d(exp_args.params, split), "nats_per_copy",
                                      split_params) + "\n";
            data += jcas::json_scalar("assisted_ranging_exponent_approx",
                                      jcas::e_qi_d(exp_args.params, split, jcas::EvalMode::approx),
                                      "nats_per_copy", split_params) + "\n";
            if (exp_lambda_opt->count() > 0) {
                auto point_params = split_params;
                point_params.push_back({"lambda", jcas::fmt17(exp_lambda)});
                const jcas::RegionPoint pt = jcas::combine_operating_point(
                    exp_args.params, {exp_lambda, exp_args.n_s, exp_args.n_m}, {});
                data += jcas::json_scalar("combined_exponent", pt.exponent, "nats_per_copy",
                                          point_params) + "\n";
            }
            emit(exp_args.out_path, data);
        } else if (app.got_subcommand(rates)) {
            const auto params = channel_json_params(rate_args);
            auto split_params = params;
            split_params.push_back({"n_s", jcas::fmt17(rate_args.n_s)});
            split_params.push_back({"n_m", jcas::fmt17(rate_args.n_m)});
            jcas::ResourceSplit split{0.0, rate_args.n_s, rate_args.n_m};
            std::string data;
            data += jcas::json_scalar("assisted_capacity", jcas::c_ea(rate_args.params),
                                      "nats_per_mode", params) + "\n";
            data += jcas::json_scalar("unassisted_rate_bound", jcas::r_ua(rate_args.params, split),
                                      "nats_per_mode", split_params) + "\n";
            data += jcas::json_scalar(
                        "unassisted_holevo_exact",
                        jcas::ua_psk_holevo(rate_args.params.eta, rate_args.n_s, rate_args.n_m,
                                            rate_args.params.n_th, rate_args.tail_eps),
                        "nats_per_mode", split_params) + "\n";
            if (rate_args.ea_mode == "fock") {
                auto fock_params = params;
                fock_params.push_back({"dims", std::to_string(rate_args.dims)});
                data += jcas::json_scalar(
                            "assisted_holevo_exact",
                            jcas::ea_psk_holevo(rate_args.params.eta, rate_args.params.n_total,
                                                rate_args.params.n_th, rate_args.dims),
                            "nats_per_mode", fock_params) + "\n";
            }
            if (rate_lambda_opt->count() > 0) {
                auto point_params = split_params;
                point_params.push_back({"lambda", jcas::fmt17(rate_lambda)});
                const jcas::RegionPoint pt = jcas::combine_operating_point(
                    rate_args.params, {rate_lambda, rate_args.n_s, rate_args.n_m},
                    make_options(rate_args));
                data += jcas::json_scalar("combined_rate", pt.rate, "nats_per_mode",
                                          point_params) + "\n";
            }
            emit(rate_args.out_path, data);
        } else if (app.got_subcommand(verify)) {
            return run_verify(suite);
        } else if (app.got_subcommand(simulate)) {
            if (trials.size() == 1) trials.assign(copies.size(), trials.front());
            if (trials.size() != copies.size())
                throw std::domain_error("--trials must be one value or match --copies");
            const auto hypotheses =
                jcas::position_hypotheses_means(sim_args.params, positions);
            std::vector<jcas::McEstimate> estimates;
            for (std::size_t i = 0; i < copies.size(); ++i)
                estimates.push_back(
                    jcas::mc_discrimination(hypotheses, copies[i], trials[i], seed));
            emit(sim_args.out_path, jcas::mc_csv(estimates));
            const jcas::SlopeFit fit = jcas::slope_fit(estimates);
            auto params = channel_json_params(sim_args);
            params.push_back({"positions", std::to_string(positions)});
            params.push_back({"seed", std::to_string(seed)});
            std::string report;
            report += jcas::json_scalar("fitted_exponent", fit.exponent, "nats_per_copy", params) +
                      "\n";
            report += jcas::json_scalar("fitted_exponent_stderr", fit.stderr_value,
                                        "nats_per_copy", params) + "\n";
            report += jcas::json_scalar("analytic_exponent", jcas::e_nqi(sim_args.params),
                                        "nats_per_copy", params) + "\n";
            if (!sim_args.out_path.empty())
                std::cout << report;
            else
                std::cerr << report;
        }
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
