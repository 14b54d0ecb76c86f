#include "mcrelay/snr_distributions.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace mcrelay {

namespace {

// Rate r such that the complementary CDF is bounded by exp(-r s).
double tail_rate(const ProtocolDistribution& d) {
    const auto& p = d.params;
    if (d.kind == ProtocolKind::FG) return 1.0 / (p.gamma_bar * p.mu1);
    return df_rate(p);
}

// Modified Bessel function of the second kind; underflows quietly to 0.
double bessel_k(int order, double x) {
    if (x > 700.0) return 0.0;
    return boost::math::cyl_bessel_k(order, x);
}

// x K1(x), which tends to 1 as x -> 0 while K1 itself overflows.
double x_bessel_k1(double x) {
    if (x < 1e-150) return 1.0;
    return x * bessel_k(1, x);
}

double fg_pdf(const SnrParams& p, double s) {
    const double b = (1.0 + p.gamma_bar * p.mu1) / (p.gamma_bar * p.gamma_bar * p.mu1 * p.mu2);
    const double root = std::sqrt(b) * std::sqrt(s);
    const double x = 2.0 * root;
    const double k0 = bessel_k(0, x);
    const double decay = std::exp(-s / (p.gamma_bar * p.mu1));
    return decay * (2.0 * b * k0 + 1.0 / (p.gamma_bar * p.mu1) * x_bessel_k1(x));
}

// Exact density of gb^2 h1 h2 / (gb h1 + gb h2 + 1).
double vg_pdf(const SnrParams& p, double s) {
    const double c = 1.0 / (p.gamma_bar * p.gamma_bar * p.mu1 * p.mu2);
    const double a = df_rate(p);
    const double root = std::sqrt(c) * std::sqrt(s * (1.0 + s));
    const double x = 2.0 * root;
    const double k0 = bessel_k(0, x);
    return std::exp(-a * s) * (2.0 * c * (1.0 + 2.0 * s) * k0 + a * x_bessel_k1(x));
}

constexpr double kQuadTolerance = 1e-12;

// Integral of the density over (0, upper]. The log singularity at zero is
// removed with t = u^2 on the first piece; the rest is split on a geometric
// grid anchored at the distribution's scale, stopping once the bound on the
// remaining mass is negligible.
double integrate_density(const ProtocolDistribution& d, double upper) {
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;

    const double rate = tail_rate(d);
    const double scale = 1.0 / rate;
    auto f = [&d](double t) { return pdf(d, t); };

    const double first = std::min(upper, 0.5 * scale);
    static thread_local tanh_sinh<double> head_rule;
    double total = head_rule.integrate(
        [&](double u) {
            const double t = u * u;
            if (t <= 0.0) return 0.0;  // 2u f(u^2) -> 0 as u -> 0
            return 2.0 * u * f(t);
        },
        0.0, std::sqrt(first), kQuadTolerance);

    double lo = first;
    while (lo < upper) {
        if (rate * lo > 46.0) break;  // remaining mass below exp(-46)
        const double hi = std::min(upper, 2.0 * lo);
        total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, kQuadTolerance);
        lo = hi;
    }
    return total;
}

}  // namespace

double df_rate(const SnrParams& p) {
    return (1.0 / p.mu1 + 1.0 / p.mu2) / p.gamma_bar;
}

double pdf(const ProtocolDistribution& d, double s) {
    if (std::isnan(s) || s < 0.0) throw std::domain_error("pdf: s must be non-negative");
    const auto& p = d.params;
    switch (d.kind) {
        case ProtocolKind::DF: {
            const double lambda = df_rate(p);
            return lambda * std::exp(-lambda * s);
        }
        case ProtocolKind::FG:
            if (s == 0.0) throw SingularityError("FG density is singular at s = 0");
            return fg_pdf(p, s);
        case ProtocolKind::VG:
            if (s == 0.0) throw SingularityError("VG density is singular at s = 0");
            return vg_pdf(p, s);
    }
    return 0.0;
}

double cdf(const ProtocolDistribution& d, double s) {
    if (std::isnan(s) || s < 0.0) throw std::domain_error("cdf: s must be non-negative");
    if (s == 0.0) return 0.0;
    if (std::isinf(s)) return 1.0;
    if (d.kind == ProtocolKind::DF) return -std::expm1(-df_rate(d.params) * s);
    return std::clamp(integrate_density(d, s), 0.0, 1.0);
}

std::optional<SeriesCoefficients> series_coefficients(const ProtocolDistribution& d) {
    if (d.kind != ProtocolKind::DF) return std::nullopt;
    const double lambda = df_rate(d.params);
    return SeriesCoefficients{0, lambda, -lambda * lambda};
}

int series_order(const ProtocolDistribution& d) {
    if (auto c = series_coefficients(d)) return c->q;
    return 0;
}

}  // namespace mcrelay
