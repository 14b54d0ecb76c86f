#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "mcrelay/snr_distributions.hpp"

namespace mcrelay {

enum class SelectionScheme { Bulk, PerSubcarrier };

std::string_view to_string(SelectionScheme scheme);
/// Accepts "bulk" and "per-subcarrier" / "ps" (case-insensitive).
SelectionScheme parse_scheme(std::string_view text);

/// Series coefficients of the best-of-M density f_Psi.
struct LiftedSeries {
    int q_prime = 0;
    double g0_prime = 0.0;
    double g1_prime = 0.0;
};

/// Approximate CDF value. `raw` is the formula before clamping into [0, 1].
struct ApproxValue {
    double value = 0.0;
    double raw = 0.0;
    bool clamped = false;
};

struct OutageResult {
    double approx = 0.0;
    std::optional<double> asymptotic;
    int diversity = 0;
    bool clamped = false;
};

/**
 * Approximate P{ sum_{k=1}^{K} ln(1 + X_k) < s } for K i.i.d. variables with
 * density `density` whose expansion about zero starts at s^q:
 *
 *   S_0^{Kq+1} / (S_1 - S_0)^{Kq} * density((S_1 - S_0) / S_0)^K
 *
 * Throws std::domain_error when S_1 - S_0 <= 0 (no valid density argument).
 */
ApproxValue approximate_info_cdf(int K, int q, double s, const std::function<double(double)>& density);

/// Single-relay mutual-information CDF F_I(s).
ApproxValue f_i_approx(int K, const ProtocolDistribution& d, int q, double s);

/// Bulk selection: F_I(s)^M, asymptote (S_0 g0^K)^M when the series exists.
OutageResult bulk_outage(int M, int K, const ProtocolDistribution& d, int q, double s);

LiftedSeries lift_series(const SeriesCoefficients& c, int M);

/// Density of the best of M i.i.d. links, M F(s)^{M-1} f(s).
double f_psi(const ProtocolDistribution& d, int M, double s);

/// Per-subcarrier selection with q' = M(q+1) - 1 and f_Psi in place of f.
OutageResult ps_outage(int M, int K, const ProtocolDistribution& d, int q, double s);

/// M K (q + 1) for either scheme.
int diversity_order(SelectionScheme scheme, int M, int K, int q);

/// Dispatch on scheme using q = series_order(d).
OutageResult outage(SelectionScheme scheme, int M, int K, const ProtocolDistribution& d, double s);

}  // namespace mcrelay
