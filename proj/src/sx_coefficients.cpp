#include "mcrelay/sx_coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace mcrelay {

namespace {

// Double-precision inversions are good to about 14 digits.
constexpr double kDigitsLostLimit = 3.0;

template <class Real>
struct SignedSum {
    Real total = 0;
    Real magnitude = 0;

    double digits_lost() const {
        using std::abs;
        using std::log10;
        if (magnitude == 0) return 0.0;
        if (total == 0) return std::numeric_limits<double>::infinity();
        return static_cast<double>(log10(magnitude / abs(total)));
    }
};

template <class Invert>
auto signed_sum(const std::map<NodeMultiset, WideInt>& weights, Invert&& invert) {
    using Real = decltype(invert(weights.begin()->first));
    SignedSum<Real> out;
    using std::abs;
    for (const auto& [poles, weight] : weights) {
        if (weight == 0) continue;
        Real w;
        if constexpr (std::is_floating_point_v<Real>) w = weight.template convert_to<Real>();
        else w = Real(weight.str());
        const Real term = w * invert(poles);
        out.total += term;
        out.magnitude += abs(term);
    }
    return out;
}

}  // namespace

void SxQuery::validate() const {
    if (K < 1 || K > kMaxSubcarriers)
        throw std::invalid_argument("S_x: K must be in [1, " + std::to_string(kMaxSubcarriers) + "]");
    if (q < 0 || q > kMaxSeriesOrder)
        throw std::invalid_argument("S_x: q must be in [0, " + std::to_string(kMaxSeriesOrder) + "]");
    if (x != 0 && x != 1) throw std::invalid_argument("S_x: x must be 0 or 1");
    if (std::isnan(s) || s < 0.0) throw std::domain_error("S_x: s must be non-negative");
}

void for_each_composition(int n, int parts, const std::function<void(const Composition&)>& visit) {
    if (n < 0 || parts < 1) throw std::invalid_argument("compositions: need n >= 0 and parts >= 1");
    Composition c(static_cast<std::size_t>(parts), 0);
    c.back() = n;
    while (true) {
        visit(c);
        // Successor: take the rightmost non-zero part r >= 1, move one unit
        // into slot r - 1 and the rest of it into the last slot.
        std::size_t r = c.size() - 1;
        while (r > 0 && c[r] == 0) --r;
        if (r == 0) return;
        const int tail = c[r];
        c[r] = 0;
        c[r - 1] += 1;
        c.back() = tail - 1;
    }
}

std::vector<Composition> compositions(int n, int parts) {
    std::vector<Composition> out;
    for_each_composition(n, parts, [&](const Composition& c) { out.push_back(c); });
    return out;
}

WideInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    WideInt out = 1;
    for (int i = 1; i <= k; ++i) {
        out *= n - k + i;
        out /= i;
    }
    return out;
}

WideInt multinomial(int n, const Composition& parts) {
    if (std::accumulate(parts.begin(), parts.end(), 0) != n)
        throw std::invalid_argument("multinomial: parts must sum to n");
    WideInt out = 1;
    int remaining = n;
    for (int a : parts) {
        if (a < 0) throw std::invalid_argument("multinomial: negative part");
        out *= binomial(remaining, a);
        remaining -= a;
    }
    return out;
}

NodeMultiset pole_vector(const Composition& c, int q, int x, int j) {
    if (static_cast<int>(c.size()) != q + 1) throw std::invalid_argument("pole_vector: composition must have q + 1 parts");
    if (j < 0 || j > q) throw std::invalid_argument("pole_vector: j must be in [0, q]");
    NodeMultiset poles;
    poles.add(0.0);
    for (int p = 0; p <= q; ++p) {
        const int a = c[static_cast<std::size_t>(p)];
        if (a > 0) poles.add(static_cast<double>(q + 1 - p), a);
    }
    poles.add(static_cast<double>(q + 1 + x - j));
    return poles;
}

SxValue sx(const SxQuery& query) {
    query.validate();
    const int q = query.q;

    std::vector<WideInt> signed_binomial(static_cast<std::size_t>(q + 1));
    for (int p = 0; p <= q; ++p) signed_binomial[static_cast<std::size_t>(p)] = (p % 2 ? -1 : 1) * binomial(q, p);

    // Signed terms sharing one pole multiset are merged before inversion.
    std::map<NodeMultiset, WideInt> weights;
    for_each_composition(query.K - 1, q + 1, [&](const Composition& a) {
        WideInt weight = multinomial(query.K - 1, a);
        for (int p = 0; p <= q; ++p) {
            const auto& base = signed_binomial[static_cast<std::size_t>(p)];
            for (int r = 0; r < a[static_cast<std::size_t>(p)]; ++r) weight *= base;
        }
        if (weight == 0) return;
        for (int j = 0; j <= q; ++j)
            weights[pole_vector(a, q, query.x, j)] += weight * signed_binomial[static_cast<std::size_t>(j)];
    });

    SxValue out;
    const auto plain = signed_sum(weights, [&](const NodeMultiset& poles) {
        const InverseValue v = invert_at(poles, query.s);
        out.precision_warning = out.precision_warning || v.precision_warning;
        return static_cast<long double>(v.value);
    });
    out.value = static_cast<double>(plain.total);
    if (plain.digits_lost() <= kDigitsLostLimit) return out;

    // Heavy cancellation: redo the sum with wide residue expansions. A tier
    // is accepted once the digits lost in the sum and in each expansion
    // still leave 20.
    double expansion_loss = 0.0;
    for (const auto& [poles, weight] : weights)
        if (weight != 0) expansion_loss = std::max(expansion_loss, residue_digits_lost(poles, query.s));
    const auto try_tier = [&](auto tier) {
        constexpr unsigned digits = decltype(tier)::value;
        const auto sum = signed_sum(weights, [&](const NodeMultiset& p) {
            return invert_at_residues_wide<digits>(p, query.s);
        });
        out.value = sum.total.template convert_to<double>();
        return sum.digits_lost() + expansion_loss <= digits - 20.0;
    };
    if (try_tier(std::integral_constant<unsigned, 60>{})) return out;
    if (try_tier(std::integral_constant<unsigned, 150>{})) return out;
    out.precision_warning = out.precision_warning || !try_tier(std::integral_constant<unsigned, 400>{});
    return out;
}


}  // namespace mcrelay
