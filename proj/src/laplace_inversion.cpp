#include "mcrelay/laplace_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace mcrelay {

NodeMultiset::NodeMultiset(std::vector<Node> nodes) {
    for (const auto& n : nodes) add(n.value, n.multiplicity);
}

NodeMultiset NodeMultiset::from_values(std::span<const double> values) {
    NodeMultiset out;
    for (double v : values) out.add(v);
    return out;
}

void NodeMultiset::add(double value, int multiplicity) {
    if (multiplicity < 1) throw std::invalid_argument("node multiplicity must be at least 1");
    if (!std::isfinite(value)) throw std::invalid_argument("node value must be finite");
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), value,
                               [](const Node& n, double v) { return n.value < v; });
    if (it != nodes_.end() && it->value == value) {
        it->multiplicity += multiplicity;
    } else {
        nodes_.insert(it, Node{value, multiplicity});
    }
    total_ += multiplicity;
}

std::vector<double> NodeMultiset::expanded() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total_));
    for (const auto& n : nodes_) out.insert(out.end(), static_cast<std::size_t>(n.multiplicity), n.value);
    return out;
}

double NodeMultiset::min_separation() const noexcept {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < nodes_.size(); ++i) gap = std::min(gap, nodes_[i].value - nodes_[i - 1].value);
    return gap;
}

NodeMultiset NodeMultiset::shifted(double c) const {
    NodeMultiset out;
    for (const auto& n : nodes_) out.add(n.value + c, n.multiplicity);
    return out;
}

namespace {


void check_arguments(const NodeMultiset& poles, double s) {
    if (poles.total_count() < 2) throw std::invalid_argument("inverse Laplace: need at least two poles");
    if (std::isnan(s) || s < 0.0) throw std::domain_error("inverse Laplace: s must be non-negative");
}

// Dense upper-triangular n x n, row-major.
template <class Real>
class UpperMatrix {
public:
    explicit UpperMatrix(std::size_t n) : n_(n), a_(n * n, Real(0)) {}
    Real& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const Real& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    UpperMatrix squared() const {
        UpperMatrix out(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = i; k < n_; ++k) {
                const Real& a = (*this)(i, k);
                if (a == 0) continue;
                for (std::size_t j = k; j < n_; ++j) out(i, j) += a * (*this)(k, j);
            }
        return out;
    }

private:
    std::size_t n_;
    std::vector<Real> a_;
};

// Top-right entry of exp(s J). Shifting by the smallest node makes every
// entry non-negative, so the Taylor sum and the squarings never cancel.
template <class Real>
Real divided_difference_exp(const std::vector<double>& values, const Real& s) {
    using std::exp;
    const std::size_t n = values.size();
    const double base = values.front();
    const Real spread = s * (values.back() - base);
    int squarings = 0;
    Real scale = 1;
    while (spread * scale > 0.5) {
        scale /= 2;
        ++squarings;
    }
    std::vector<Real> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = s * (values[i] - base) * scale;
    const Real upper = s * scale;

    // Horner: P <- I + A P / k, from the highest degree down. Terms past
    // degree n-1+m shrink like 0.5^m / m! relative to the result.
    const int degree = static_cast<int>(n) + 24 + std::numeric_limits<Real>::digits10 / 2;
    UpperMatrix<Real> p(n);
    for (std::size_t i = 0; i < n; ++i) p(i, i) = 1;
    for (int k = degree; k >= 1; --k) {
        UpperMatrix<Real> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                Real v = diag[i] * p(i, j);
                if (j > i) v += upper * p(i + 1, j);
                next(i, j) = v / k;
            }
            next(i, i) += 1;
        }
        p = std::move(next);
    }
    for (int i = 0; i < squarings; ++i) p = p.squared();
    return p(0, n - 1) * exp(Real(base) * s);
}

// Lower bound of the transform: s^{n-1} e^{beta_min s} / (n-1)!, as log10.
double log10_lower_bound(double beta_min, int n, double s) {
    return ((n - 1) * std::log(s) + beta_min * s - std::lgamma(static_cast<double>(n))) / std::numbers::ln10;
}

// Digits lost when terms as large as `max_term` cancel down to the result.
double digits_lost(double max_term, double log10_floor, std::size_t terms) {
    if (!(max_term > 0.0)) return 0.0;
    const double loss = std::log10(max_term * static_cast<double>(terms)) - log10_floor;
    if (std::isnan(loss)) return std::numeric_limits<double>::infinity();
    return std::max(loss, 0.0);
}

// Below this loss a double result keeps about 13 digits.
constexpr double kDoubleLossLimit = 3.0;

template <class Real, class Sink>
Real residue_sum(const NodeMultiset& poles, const Real& s, Sink&& on_term) {
    using std::exp;
    using std::pow;
    const auto& nodes = poles.nodes();
    Real total = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const int order = nodes[j].multiplicity;
        const Real beta = nodes[j].value;

        // Taylor coefficients in w = z - beta of prod_{k != j} (z - beta_k)^{-m_k},
        // truncated at w^{order-1}.
        std::vector<Real> series(static_cast<std::size_t>(order), Real(0));
        series[0] = 1;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (k == j) continue;
            const Real d = beta - Real(nodes[k].value);
            const int m = nodes[k].multiplicity;
            // (d + w)^{-m} = d^{-m} sum_r C(m+r-1, r) (-w/d)^r
            std::vector<Real> factor(series.size());
            Real coeff = 1 / pow(d, m);
            for (std::size_t r = 0; r < factor.size(); ++r) {
                factor[r] = coeff;
                coeff *= -Real(m + static_cast<int>(r)) / (Real(static_cast<int>(r) + 1) * d);
            }
            std::vector<Real> product(series.size(), Real(0));
            for (std::size_t p = 0; p < series.size(); ++p)
                for (std::size_t r = 0; r + p < series.size(); ++r) product[p + r] += series[p] * factor[r];
            series = std::move(product);
        }

        // c_{j,i} = series[order - i]; term c_{j,i} s^{i-1} / (i-1)!.
        const Real e = exp(beta * s);
        Real power = 1;  // s^{i-1} / (i-1)!
        for (int i = 1; i <= order; ++i) {
            const Real term = series[static_cast<std::size_t>(order - i)] * power * e;
            on_term(term);
            total += term;
            power *= s / i;
        }
    }
    return total;
}

template <class Real>
Real simple_pole_sum(std::span<const double> poles, const Real& s, double* max_term) {
    using std::abs;
    using std::exp;
    Real total = 0;
    for (std::size_t k = 0; k < poles.size(); ++k) {
        Real denom = 1;
        for (std::size_t n = 0; n < poles.size(); ++n) {
            if (n == k) continue;
            denom *= Real(poles[k]) - Real(poles[n]);
        }
        const Real term = exp(Real(poles[k]) * s) / denom;
        if (max_term) *max_term = std::max(*max_term, static_cast<double>(abs(term)));
        total += term;
    }
    return total;
}

// Runs `eval` with enough digits to absorb `loss`.
template <class Eval>
double at_precision(double loss, Eval&& eval) {
    if (loss <= 60 - 20) return static_cast<double>(eval(WideReal<60>()));
    if (loss <= 150 - 20) return static_cast<double>(eval(WideReal<150>()));
    return static_cast<double>(eval(WideReal<400>()));
}

}  // namespace

InverseValue invert_at(const NodeMultiset& poles, double s) {
    check_arguments(poles, s);
    InverseValue out;
    out.precision_warning = poles.min_separation() < kCloseNodeThreshold;
    if (s == 0.0) return out;

    // exp(s J) with J bidiagonal: scaling the superdiagonal by s as well keeps
    // the top-right entry equal to the divided difference of exp(beta s).
    out.value = divided_difference_exp<double>(poles.expanded(), s);
    return out;
}

double residue_digits_lost(const NodeMultiset& poles, double s) {
    check_arguments(poles, s);
    if (s == 0.0) return 0.0;
    double max_term = 0.0;
    residue_sum<double>(poles, s, [&](double t) { max_term = std::max(max_term, std::abs(t)); });
    const double floor = log10_lower_bound(poles.nodes().front().value, poles.total_count(), s);
    return digits_lost(max_term, floor, static_cast<std::size_t>(poles.total_count()));
}

double invert_at_residues(const NodeMultiset& poles, double s) {
    check_arguments(poles, s);
    if (s == 0.0) return 0.0;
    const double loss = residue_digits_lost(poles, s);
    if (loss <= kDoubleLossLimit) return residue_sum<double>(poles, s, [](double) {});
    return at_precision(loss, [&](auto zero) {
        using Real = decltype(zero);
        return residue_sum<Real>(poles, Real(s), [](const Real&) {});
    });
}

template <unsigned Digits>
WideReal<Digits> invert_at_residues_wide(const NodeMultiset& poles, double s) {
    check_arguments(poles, s);
    if (s == 0.0) return WideReal<Digits>(0);
    return residue_sum<WideReal<Digits>>(poles, WideReal<Digits>(s), [](const WideReal<Digits>&) {});
}

template WideReal<60> invert_at_residues_wide<60>(const NodeMultiset&, double);
template WideReal<150> invert_at_residues_wide<150>(const NodeMultiset&, double);
template WideReal<400> invert_at_residues_wide<400>(const NodeMultiset&, double);

double invert_simple_poles(std::span<const double> poles, double s) {
    if (poles.empty()) throw std::invalid_argument("inverse Laplace: no poles");
    double beta_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < poles.size(); ++k) {
        beta_min = std::min(beta_min, poles[k]);
        for (std::size_t n = k + 1; n < poles.size(); ++n)
            if (poles[k] == poles[n])
                throw std::invalid_argument("invert_simple_poles: poles must be pairwise distinct");
    }
    double max_term = 0.0;
    const double plain = simple_pole_sum<double>(poles, s, &max_term);
    if (s <= 0.0 || poles.size() < 2) return plain;
    const double floor = log10_lower_bound(beta_min, static_cast<int>(poles.size()), s);
    const double loss = digits_lost(max_term, floor, poles.size());
    if (loss <= kDoubleLossLimit) return plain;
    return at_precision(loss, [&](auto zero) {
        using Real = decltype(zero);
        return simple_pole_sum<Real>(poles, Real(s), nullptr);
    });
}

}  // namespace mcrelay
