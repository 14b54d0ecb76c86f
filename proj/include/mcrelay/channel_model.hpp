#pragma once

#include <cmath>
#include <string_view>

#include "mcrelay/rng.hpp"

namespace mcrelay {

/// Forwarding protocol at the relay.
enum class ProtocolKind { DF, FG, VG };

std::string_view to_string(ProtocolKind kind);
/// Accepts "DF", "FG", "VG" (case-insensitive). Throws std::invalid_argument otherwise.
ProtocolKind parse_protocol(std::string_view text);

/// Rayleigh hop: |h|^2 is exponential with mean `mu`.
struct HopGainParams {
    double mu = 1.0;

    /// Throws std::invalid_argument unless mu > 0.
    void validate() const;
};

/// Squared channel magnitudes of one (relay, subcarrier) link.
struct LinkRealization {
    double h1_sq = 0.0;
    double h2_sq = 0.0;
};

/// Average transmit SNR (linear) and per-hop mean gains.
struct SnrParams {
    double gamma_bar = 1.0;
    double mu1 = 1.0;
    double mu2 = 1.0;

    void validate() const;
};

double gain_pdf(double x, HopGainParams p);
double gain_cdf(double x, HopGainParams p);

/// Inverse-CDF draw, -mu * ln(U) with U in (0, 1).
inline double sample_gain(HopGainParams p, TrialStream& rng) noexcept {
    return -p.mu * std::log(rng.uniform_open());
}

/**
 * Instantaneous end-to-end SNR of a two-hop link.
 *
 *   DF: gb * min(h1, h2)
 *   FG: gb^2 h1 h2 / (gb mu1 + gb h2 + 1)
 *   VG: gb^2 h1 h2 / (gb h1 + gb h2 + 1)
 */
inline double end_to_end_snr(ProtocolKind kind, LinkRealization link, const SnrParams& p) noexcept {
    const double g1 = p.gamma_bar * link.h1_sq;
    const double g2 = p.gamma_bar * link.h2_sq;
    switch (kind) {
        case ProtocolKind::DF:
            return g1 < g2 ? g1 : g2;
        case ProtocolKind::FG:
            return g1 * g2 / (p.gamma_bar * p.mu1 + g2 + 1.0);
        case ProtocolKind::VG:
            return g1 * g2 / (g1 + g2 + 1.0);
    }
    return 0.0;
}

}  // namespace mcrelay
