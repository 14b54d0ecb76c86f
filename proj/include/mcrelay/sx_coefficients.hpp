#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mcrelay/laplace_inversion.hpp"

namespace mcrelay {

/// Exact signed integer wide enough for every weight with K <= 64, q <= 4.
/// Arithmetic past its range throws std::overflow_error.
using WideInt = boost::multiprecision::checked_int512_t;

inline constexpr int kMaxSubcarriers = 64;
inline constexpr int kMaxSeriesOrder = 4;

/// (a_0, ..., a_q), non-negative parts summing to K - 1.
using Composition = std::vector<int>;

struct SxQuery {
    int K = 1;
    double s = 0.0;
    int q = 0;
    int x = 0;

    void validate() const;
};

/// Calls `visit` once per tuple of `parts` non-negative integers summing to
/// `n`, in lexicographic order.
void for_each_composition(int n, int parts, const std::function<void(const Composition&)>& visit);
std::vector<Composition> compositions(int n, int parts);

/// n! / (a_0! ... a_q!). Throws std::invalid_argument if the parts do not sum to n.
WideInt multinomial(int n, const Composition& parts);
WideInt binomial(int n, int k);

/// {0} + {q+1-p repeated a_p times} + {q+1+x-j}, coincident values merged.
NodeMultiset pole_vector(const Composition& c, int q, int x, int j);

struct SxValue {
    double value = 0.0;
    bool precision_warning = false;
};

/**
 * Combinatorial coefficient S_x(K, s, q):
 *
 *   sum_j C(q,j) (-1)^j  sum_{a}  (K-1)!/(a_0!...a_q!)  prod_p [C(q,p)(-1)^p]^{a_p}
 *         * L^{-1}[ 1 / prod_{beta in B(a, j)} (z - beta) ](s)
 *
 * Integer weights are exact and terms sharing a pole multiset are merged
 * before inversion. When the signed terms cancel too far for double
 * precision (q >= 1 with larger K), the sum is redone with 60, 150 or 400
 * digit residue expansions; precision_warning is set if even that fails.
 */
SxValue sx(const SxQuery& query);

}  // namespace mcrelay
