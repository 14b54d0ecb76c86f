#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcrelay/channel_model.hpp"
#include "mcrelay/outage_analytics.hpp"

namespace mcrelay {

struct SimConfig {
    int M = 1;
    int K = 1;
    ProtocolKind protocol = ProtocolKind::DF;
    SelectionScheme scheme = SelectionScheme::Bulk;
    SnrParams snr_params;
    double s_threshold = 2.0;  // nats
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const;
};

/// Mutual information of one channel realization under both selection rules.
struct TrialInfo {
    double bulk_info = 0.0;  // max_m sum_k ln(1 + gamma(m,k))
    double ps_info = 0.0;    // sum_k ln(1 + max_m gamma(m,k))
    int relays_used = 0;     // distinct relays chosen by per-subcarrier selection
};

/// Draws trial `trial_index` of the run and evaluates it. Gains are drawn
/// relay-major (relay 0's K pairs first), h1 before h2, so that adding a
/// relay only appends draws. Ties go to the lowest relay index.
TrialInfo run_trial(const SimConfig& cfg, std::uint64_t trial_index);

/// Outage fraction with a 95% Wilson score interval.
struct OutageEstimate {
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t outage_count = 0;
    bool low_count = false;  // fewer than 10 outage events; interval unreliable
};

OutageEstimate wilson_estimate(std::uint64_t outage_count, std::uint64_t trials);

OutageEstimate estimate_outage(const SimConfig& cfg);

/**
 * Outage counts for every (protocol, scheme, SNR point) from one pass over
 * shared channel draws. All entries see the same realizations, so orderings
 * between protocols, schemes and SNR values hold trial by trial.
 */
struct SweepRequest {
    int M = 1;
    int K = 1;
    double mu1 = 1.0;
    double mu2 = 1.0;
    double s_threshold = 2.0;
    std::vector<double> gamma_bars;  // linear
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
    // Protocols to evaluate, indexed by ProtocolKind; skipped ones count zero.
    std::array<bool, 3> protocols{true, true, true};
};

struct SweepCounts {
    std::uint64_t trials = 0;
    // [protocol][scheme][point]
    std::array<std::array<std::vector<std::uint64_t>, 2>, 3> outages;

    const std::vector<std::uint64_t>& at(ProtocolKind kind, SelectionScheme scheme) const {
        return outages[static_cast<std::size_t>(kind)][static_cast<std::size_t>(scheme)];
    }
};

SweepCounts count_outages(const SweepRequest& request);

struct CurvePoint {
    double snr_db = 0.0;
    double analytic = 0.0;
    std::optional<double> asymptotic;
    bool clamped = false;
    OutageEstimate mc;
};

using OutageCurve = std::vector<CurvePoint>;

/// Monte Carlo estimate plus analytic approximation and asymptote at each
/// grid point. `snr_grid_db` must be non-empty and strictly increasing.
OutageCurve estimate_curve(const SimConfig& cfg, std::span<const double> snr_grid_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace mcrelay
