#include "mcrelay/outage_analytics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mcrelay/sx_coefficients.hpp"

namespace mcrelay {

std::string_view to_string(SelectionScheme scheme) {
    return scheme == SelectionScheme::Bulk ? "bulk" : "per-subcarrier";
}

SelectionScheme parse_scheme(std::string_view text) {
    std::string lower(text);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "bulk") return SelectionScheme::Bulk;
    if (lower == "per-subcarrier" || lower == "per_subcarrier" || lower == "ps" || lower == "persubcarrier")
        return SelectionScheme::PerSubcarrier;
    throw std::invalid_argument("unknown selection scheme '" + std::string(text) + "' (expected bulk or per-subcarrier)");
}

namespace {

void check_counts(int M, int K) {
    if (M < 1) throw std::invalid_argument("relay count M must be at least 1");
    if (K < 1) throw std::invalid_argument("subcarrier count K must be at least 1");
}

void check_threshold(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("outage threshold s must be positive and finite");
}

}  // namespace

ApproxValue approximate_info_cdf(int K, int q, double s, const std::function<double(double)>& density) {
    check_threshold(s);
    const double s0 = sx({K, s, q, 0}).value;
    const double s1 = sx({K, s, q, 1}).value;
    const double diff = s1 - s0;
    if (!(diff > 0.0) || !(s0 > 0.0))
        throw std::domain_error("S_1 - S_0 must be positive for the outage approximation");

    const double kq = static_cast<double>(K) * q;
    const double f = density(diff / s0);
    const double raw = std::pow(s0, kq + 1.0) / std::pow(diff, kq) * std::pow(f, K);

    ApproxValue out;
    out.raw = raw;
    out.clamped = raw > 1.0;
    out.value = std::clamp(raw, 0.0, 1.0);
    return out;
}

ApproxValue f_i_approx(int K, const ProtocolDistribution& d, int q, double s) {
    return approximate_info_cdf(K, q, s, [&d](double x) { return pdf(d, x); });
}

OutageResult bulk_outage(int M, int K, const ProtocolDistribution& d, int q, double s) {
    check_counts(M, K);
    const ApproxValue fi = f_i_approx(K, d, q, s);

    OutageResult out;
    out.approx = std::pow(fi.value, M);
    out.clamped = fi.clamped;
    out.diversity = diversity_order(SelectionScheme::Bulk, M, K, q);
    if (auto c = series_coefficients(d); c && c->q == q) {
        const double s0 = sx({K, s, q, 0}).value;
        out.asymptotic = std::pow(s0 * std::pow(c->g0, K), M);
    }
    return out;
}

LiftedSeries lift_series(const SeriesCoefficients& c, int M) {
    if (M < 1) throw std::invalid_argument("relay count M must be at least 1");
    const double q1 = c.q + 1.0;
    const double g0m1 = std::pow(c.g0, M - 1);
    LiftedSeries out;
    out.q_prime = M * (c.q + 1) - 1;
    out.g0_prime = M * std::pow(c.g0, M) / std::pow(q1, M - 1);
    out.g1_prime = M * (g0m1 * c.g1 / std::pow(q1, M - 1) +
                        (M - 1) * g0m1 * c.g1 / (std::pow(q1, M - 2) * (c.q + 2.0)));
    return out;
}

double f_psi(const ProtocolDistribution& d, int M, double s) {
    if (M < 1) throw std::invalid_argument("relay count M must be at least 1");
    if (M == 1) return pdf(d, s);
    return M * std::pow(cdf(d, s), M - 1) * pdf(d, s);
}

OutageResult ps_outage(int M, int K, const ProtocolDistribution& d, int q, double s) {
    check_counts(M, K);
    const int q_prime = M * (q + 1) - 1;
    const ApproxValue fi = approximate_info_cdf(K, q_prime, s, [&](double x) { return f_psi(d, M, x); });

    OutageResult out;
    out.approx = fi.value;
    out.clamped = fi.clamped;
    out.diversity = diversity_order(SelectionScheme::PerSubcarrier, M, K, q);
    if (auto c = series_coefficients(d); c && c->q == q) {
        const LiftedSeries lifted = lift_series(*c, M);
        const double s0 = sx({K, s, lifted.q_prime, 0}).value;
        out.asymptotic = s0 * std::pow(lifted.g0_prime, K);
    }
    return out;
}

int diversity_order(SelectionScheme /*scheme*/, int M, int K, int q) {
    return M * K * (q + 1);
}

OutageResult outage(SelectionScheme scheme, int M, int K, const ProtocolDistribution& d, double s) {
    const int q = series_order(d);
    return scheme == SelectionScheme::Bulk ? bulk_outage(M, K, d, q, s) : ps_outage(M, K, d, q, s);
}

}  // namespace mcrelay
