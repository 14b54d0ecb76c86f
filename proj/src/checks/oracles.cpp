#include "mcrelay/checks/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace mcrelay::oracle {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Poly = std::vector<Rational>;  // ascending coefficients

Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// First n Taylor coefficients of 1 / p(w), p(0) != 0.
Poly invert_series(const Poly& p, std::size_t n) {
    Poly out(n, Rational(0));
    out[0] = Rational(1) / p[0];
    for (std::size_t k = 1; k < n; ++k) {
        Rational acc = 0;
        for (std::size_t i = 1; i <= k && i < p.size(); ++i) acc += p[i] * out[k - i];
        out[k] = -acc / p[0];
    }
    return out;
}

BigInt factorial(int n) {
    BigInt out = 1;
    for (int i = 2; i <= n; ++i) out *= i;
    return out;
}

void enumerate(int remaining, int slot, std::vector<int>& parts, const std::function<void(const std::vector<int>&)>& visit) {
    if (slot + 1 == static_cast<int>(parts.size())) {
        parts[static_cast<std::size_t>(slot)] = remaining;
        visit(parts);
        return;
    }
    for (int a = 0; a <= remaining; ++a) {
        parts[static_cast<std::size_t>(slot)] = a;
        enumerate(remaining - a, slot + 1, parts, visit);
    }
}

// Exact exponential polynomial: (beta, i) -> coefficient of s^i e^{beta s}.
using ExpPoly = std::map<std::pair<int, int>, Rational>;

void add_inverse_laplace(std::span<const int> poles, const Rational& scale, ExpPoly& out) {
    std::map<int, int> mult;
    for (int b : poles) ++mult[b];
    for (const auto& [beta, order] : mult) {
        // Cofactor prod_{k != beta} (z - b_k)^{m_k} expanded in w = z - beta.
        Poly cofactor{Rational(1)};
        for (const auto& [other, m] : mult) {
            if (other == beta) continue;
            const Poly linear{Rational(beta - other), Rational(1)};
            for (int r = 0; r < m; ++r) cofactor = multiply(cofactor, linear);
        }
        const Poly inv = invert_series(cofactor, static_cast<std::size_t>(order));
        // Residue of e^{zs} / ((z - beta)^order * cofactor) at beta.
        for (int i = 1; i <= order; ++i)
            out[{beta, i - 1}] += scale * inv[static_cast<std::size_t>(order - i)] / Rational(factorial(i - 1));
    }
}

long double evaluate(const ExpPoly& terms, long double s) {
    using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<300>>;
    const Wide ws(s);
    Wide total = 0;
    for (const auto& [key, c] : terms) {
        if (c == 0) continue;
        total += Wide(c) * pow(ws, key.second) * exp(Wide(key.first) * ws);
    }
    return total.convert_to<long double>();
}

}  // namespace

long double inverse_laplace_integer_poles(std::span<const int> poles, long double s) {
    ExpPoly terms;
    add_inverse_laplace(poles, Rational(1), terms);
    return evaluate(terms, s);
}

long double sx_enumerated(int K, long double s, int q, int x) {
    ExpPoly terms;
    std::vector<int> parts(static_cast<std::size_t>(q + 1), 0);
    const BigInt top = factorial(K - 1);
    for (int j = 0; j <= q; ++j) {
        const BigInt outer = (j % 2 ? -1 : 1) * factorial(q) / (factorial(j) * factorial(q - j));
        enumerate(K - 1, 0, parts, [&](const std::vector<int>& a) {
            BigInt weight = top;
            std::vector<int> poles{0};
            for (int p = 0; p <= q; ++p) {
                const int ap = a[static_cast<std::size_t>(p)];
                weight /= factorial(ap);
                const BigInt base = (p % 2 ? -1 : 1) * factorial(q) / (factorial(p) * factorial(q - p));
                for (int r = 0; r < ap; ++r) {
                    weight *= base;
                    poles.push_back(q + 1 - p);
                }
            }
            poles.push_back(q + 1 + x - j);
            add_inverse_laplace(poles, Rational(outer * weight), terms);
        });
    }
    return evaluate(terms, s);
}

double df_outage_single_carrier(int M, const SnrParams& p, double s) {
    const double lambda = (1.0 / p.mu1 + 1.0 / p.mu2) / p.gamma_bar;
    return std::pow(-std::expm1(-lambda * std::expm1(s)), M);
}

double fg_cdf_closed_form(const SnrParams& p, double s) {
    if (s <= 0.0) return 0.0;
    const double b = (1.0 + p.gamma_bar * p.mu1) / (p.gamma_bar * p.gamma_bar * p.mu1 * p.mu2);
    const double x = 2.0 * std::sqrt(b * s);
    if (x > 700.0) return 1.0;
    return 1.0 - std::exp(-s / (p.gamma_bar * p.mu1)) * x * std::cyl_bessel_k(1.0, x);
}

double vg_cdf_closed_form(const SnrParams& p, double s) {
    if (s <= 0.0) return 0.0;
    const double a = (1.0 / p.mu1 + 1.0 / p.mu2) / p.gamma_bar;
    const double x = 2.0 * std::sqrt(s * (1.0 + s) / (p.gamma_bar * p.gamma_bar * p.mu1 * p.mu2));
    if (x > 700.0) return 1.0;
    return 1.0 - std::exp(-a * s) * x * std::cyl_bessel_k(1.0, x);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> rule;
    return rule.integrate([&](double t) { return f(t); }, a, std::numeric_limits<double>::infinity(), 1e-12);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate([&](double t) { return f(t); }, a, b, 1e-12);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

double chi_square_p_value(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2) throw std::invalid_argument("chi-square: bin mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace mcrelay::oracle
