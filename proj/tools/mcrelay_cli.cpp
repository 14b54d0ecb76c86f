// mcrelay: outage analytics and Monte Carlo sweeps for multicarrier relay selection.
//
//   mcrelay sweep <spec.json> [--out-dir DIR] [--threads N]
//   mcrelay point --M 2 --K 2 --protocol DF --scheme bulk --snr-db 20 [--xi 1 | --rate-bits 1] ...
//   mcrelay verify --level fast|full

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mcrelay/checks/checks.hpp"
#include "mcrelay/cli_runner.hpp"

namespace {

int run_sweep(const std::string& spec_path, const std::optional<std::string>& out_dir, std::optional<unsigned> threads) {
    mcrelay::RunSpec spec;
    try {
        spec = mcrelay::load_run_spec(spec_path);
    } catch (const std::exception& ex) {
        std::cerr << "invalid run spec: " << ex.what() << '\n';
        return 2;
    }
    if (threads) spec.threads = *threads;
    const auto dir = mcrelay::resolve_output_dir(out_dir, spec);
    return mcrelay::run(spec, dir, std::cout);
}

struct PointArgs {
    int M = 2;
    int K = 2;
    std::string protocol = "DF";
    std::string scheme = "bulk";
    double mu1 = 1.0;
    double mu2 = 1.0;
    double snr_db = 20.0;
    std::optional<double> xi;
    std::optional<double> rate_bits;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string format = "csv";
};

int run_point(const PointArgs& a) {
    try {
        if (a.xi && a.rate_bits) throw std::invalid_argument("give either --xi or --rate-bits, not both");
        mcrelay::Experiment e;
        e.name = "point";
        e.M = a.M;
        e.K = a.K;
        e.protocol = mcrelay::parse_protocol(a.protocol);
        e.scheme = mcrelay::parse_scheme(a.scheme);
        e.mu1 = a.mu1;
        e.mu2 = a.mu2;
        e.xi = a.xi ? *a.xi : a.rate_bits ? mcrelay::bits_to_nats(*a.rate_bits) : 1.0;
        e.snr_db_start = e.snr_db_stop = a.snr_db;
        e.trials = a.trials;
        e.seed = a.seed;
        e.validate();

        const std::vector<double> grid{a.snr_db};
        const auto curve = mcrelay::estimate_curve(e.sim_config(a.threads), grid);
        if (a.format == "json") {
            std::cout << mcrelay::curve_to_json(curve).dump(2) << '\n';
        } else {
            std::cout << mcrelay::format_csv(curve);
        }
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
}

int run_verify(const std::string& level) {
    const auto lvl = level == "full" ? mcrelay::checks::VerifyLevel::Full : mcrelay::checks::VerifyLevel::Fast;
    const auto results = mcrelay::checks::run_verification(lvl);
    for (const auto& r : results)
        std::cerr << fmt::format("[{}] {} ({:.1f} s)\n", r.passed ? "PASS" : "FAIL", r.name, r.seconds);
    const auto report = mcrelay::checks::to_json(results);
    std::cout << report.dump(2) << '\n';
    return report.at("passed").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage probability of multicarrier relay selection: analytic approximations and Monte Carlo"};
    app.require_subcommand(1);

    std::string spec_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned> sweep_threads;
    auto* sweep = app.add_subcommand("sweep", "Run every experiment of a JSON run spec");
    sweep->add_option("spec", spec_path, "Run spec file (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out-dir", out_dir, "Output directory (overrides spec and $MCRELAY_OUTPUT_DIR)");
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");

    PointArgs point_args;
    auto* point = app.add_subcommand("point", "Evaluate one configuration at one SNR");
    point->add_option("--M", point_args.M, "Number of relays")->check(CLI::PositiveNumber);
    point->add_option("--K", point_args.K, "Number of subcarriers")->check(CLI::Range(1, 64));
    point->add_option("--protocol", point_args.protocol, "DF, FG or VG");
    point->add_option("--scheme", point_args.scheme, "bulk or per-subcarrier");
    point->add_option("--mu1", point_args.mu1, "Mean first-hop channel gain");
    point->add_option("--mu2", point_args.mu2, "Mean second-hop channel gain");
    point->add_option("--snr-db", point_args.snr_db, "Average SNR in dB");
    point->add_option("--xi", point_args.xi, "Mutual-information threshold in nats (s = 2 xi)");
    point->add_option("--rate-bits", point_args.rate_bits, "Target rate in bits (xi = rate * ln 2)");
    point->add_option("--trials", point_args.trials, "Monte Carlo trials");
    point->add_option("--seed", point_args.seed, "Master seed");
    point->add_option("--threads", point_args.threads, "Worker threads (0 = all cores)");
    point->add_option("--format", point_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string level = "fast";
    auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

    CLI11_PARSE(app, argc, argv);

    if (*sweep) return run_sweep(spec_path, out_dir, sweep_threads);
    if (*point) return run_point(point_args);
    if (*verify) return run_verify(level);
    return 0;
}
