#include "mcrelay/channel_model.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mcrelay {

std::string_view to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::DF: return "DF";
        case ProtocolKind::FG: return "FG";
        case ProtocolKind::VG: return "VG";
    }
    return "?";
}

ProtocolKind parse_protocol(std::string_view text) {
    std::string upper(text);
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "DF") return ProtocolKind::DF;
    if (upper == "FG") return ProtocolKind::FG;
    if (upper == "VG") return ProtocolKind::VG;
    throw std::invalid_argument("unknown protocol '" + std::string(text) + "' (expected DF, FG or VG)");
}

void HopGainParams::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mean channel gain must be positive");
}

void SnrParams::validate() const {
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw std::invalid_argument("gamma_bar must be positive");
    if (!(mu1 > 0.0) || !std::isfinite(mu1)) throw std::invalid_argument("mu1 must be positive");
    if (!(mu2 > 0.0) || !std::isfinite(mu2)) throw std::invalid_argument("mu2 must be positive");
}

double gain_pdf(double x, HopGainParams p) {
    p.validate();
    if (x < 0.0) throw std::domain_error("gain_pdf: x must be non-negative");
    return std::exp(-x / p.mu) / p.mu;
}

double gain_cdf(double x, HopGainParams p) {
    p.validate();
    if (x < 0.0) throw std::domain_error("gain_cdf: x must be non-negative");
    return -std::expm1(-x / p.mu);
}

}  // namespace mcrelay
