#pragma once

#include <optional>
#include <stdexcept>

#include "mcrelay/channel_model.hpp"

namespace mcrelay {

/// Near-zero expansion f(s) = s^q (g0 + g1 s + O(s^2)) of an SNR density.
struct SeriesCoefficients {
    int q = 0;
    double g0 = 0.0;
    double g1 = 0.0;
};

/// End-to-end SNR law of one relayed subcarrier.
struct ProtocolDistribution {
    ProtocolKind kind = ProtocolKind::DF;
    SnrParams params;
};

/// Raised when a density is evaluated exactly at its singular point.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Exponential rate of the DF end-to-end SNR, (1/mu1 + 1/mu2) / gamma_bar.
double df_rate(const SnrParams& p);

/**
 * Density of the end-to-end SNR.
 *
 * DF is exponential. FG and VG are the two-term K0/K1 Bessel densities; both
 * have a logarithmic singularity at s = 0 and throw SingularityError there.
 */
double pdf(const ProtocolDistribution& d, double s);

/// CDF. Closed form for DF; adaptive quadrature of pdf() for FG and VG
/// (absolute tolerance about 1e-10).
double cdf(const ProtocolDistribution& d, double s);

/// Exact (q, g0, g1) when the density has a power-series expansion about
/// zero. Only DF qualifies; FG and VG return nullopt.
std::optional<SeriesCoefficients> series_coefficients(const ProtocolDistribution& d);

/// Series exponent used by the outage approximations. FG and VG are
/// substituted directly with q = 0.
int series_order(const ProtocolDistribution& d);

}  // namespace mcrelay
