#pragma once

// Reference computations that share no code path with the library routines
// they are used to check.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mcrelay/channel_model.hpp"

namespace mcrelay::oracle {

/// Inverse Laplace transform of 1/prod (z - b_k) for integer poles, with the
/// partial-fraction coefficients computed in exact rational arithmetic
/// (Taylor inversion of the cofactor polynomial at each pole) and the final
/// exponential polynomial evaluated at 300 digits.
long double inverse_laplace_integer_poles(std::span<const int> poles, long double s);

/// S_x(K, s, q) by recursive enumeration of compositions with exact factorial
/// weights. Terms are combined symbolically before a single 300-digit
/// evaluation, so sign cancellation costs nothing.
long double sx_enumerated(int K, long double s, int q, int x);

/// Exact single-carrier DF outage with M relays (bulk and per-subcarrier
/// coincide for K = 1): (1 - exp(-lambda (e^s - 1)))^M.
double df_outage_single_carrier(int M, const SnrParams& p, double s);

/// Closed-form CDFs obtained from P{gamma > s} = exp(-r s) * x K1(x).
double fg_cdf_closed_form(const SnrParams& p, double s);
double vg_cdf_closed_form(const SnrParams& p, double s);

/// Integral of f over [a, inf) with double-exponential quadrature.
double integrate_to_infinity(const std::function<double(double)>& f, double a);
/// Integral of f over [a, b] (tanh-sinh; tolerates endpoint singularities).
double integrate(const std::function<double(double)>& f, double a, double b);

/// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Upper-tail p-value of Pearson's chi-square statistic for `observed`
/// counts against `expected` counts.
double chi_square_p_value(std::span<const double> observed, std::span<const double> expected);

}  // namespace mcrelay::oracle
