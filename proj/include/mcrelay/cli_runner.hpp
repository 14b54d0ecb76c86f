#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcrelay/monte_carlo.hpp"

namespace mcrelay {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "MCRELAY_OUTPUT_DIR";

/// Mutual-information threshold in nats for a rate given in bits.
inline double bits_to_nats(double bits) { return bits * std::log(2.0); }
/// Outage threshold s = 2 xi: two half-duplex slots per end-to-end transfer.
inline double threshold_from_xi(double xi_nats) { return 2.0 * xi_nats; }

struct Experiment {
    std::string name;
    int M = 2;
    int K = 2;
    ProtocolKind protocol = ProtocolKind::DF;
    SelectionScheme scheme = SelectionScheme::Bulk;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double xi = 1.0;  // nats
    double snr_db_start = 15.0;
    double snr_db_stop = 50.0;
    double snr_db_step = 5.0;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<std::string> outputs{"csv"};

    double s_threshold() const { return threshold_from_xi(xi); }
    std::vector<double> snr_grid_db() const;
    SimConfig sim_config(unsigned threads) const;
    void validate() const;
};

struct RunSpec {
    std::vector<Experiment> experiments;
    std::optional<std::string> output_dir;
    unsigned threads = 0;
};

/// Parses and validates a run specification. Unknown keys, a missing
/// experiment list and simultaneous "xi" / "rate_bits" are errors
/// (std::invalid_argument).
RunSpec parse_run_spec(const nlohmann::json& doc);
RunSpec load_run_spec(const std::filesystem::path& path);

/// Parses one experiment object; absent keys keep their defaults.
Experiment parse_experiment(const nlohmann::json& obj, std::size_t index);

inline const char* kCsvHeader = "snr_db,analytic,asymptotic,mc_p_hat,mc_ci_low,mc_ci_high,clamped_flag";

std::string format_csv(const OutageCurve& curve);
nlohmann::json curve_to_json(const OutageCurve& curve);

/// Least-squares slope of log10(value) against SNR in dB over the points
/// in the top `window_db` of the curve with a positive value.
struct SlopeFit {
    std::optional<double> analytic;
    std::optional<double> monte_carlo;
};
SlopeFit fit_high_snr_slope(const OutageCurve& curve, double window_db = 10.0);

struct ExperimentOutcome {
    std::string name;
    bool ok = false;
    std::string error;
    int diversity = 0;
    SlopeFit slopes;
    std::vector<std::filesystem::path> files;
};

/// Runs every experiment in order and writes its output files into
/// `output_dir`. A failing experiment is reported and skipped. Returns 0 when
/// every experiment succeeded.
int run(const RunSpec& spec, const std::filesystem::path& output_dir, std::ostream& log,
        std::vector<ExperimentOutcome>* outcomes = nullptr);

/// Output directory: explicit override, then the spec, then $MCRELAY_OUTPUT_DIR, then ".".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& override_dir, const RunSpec& spec);

}  // namespace mcrelay
