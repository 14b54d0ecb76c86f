#pragma once

#include <compare>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace mcrelay {

/// Real pole with its multiplicity.
struct Node {
    double value = 0.0;
    int multiplicity = 1;

    auto operator<=>(const Node&) const = default;
};

/**
 * Poles of 1 / prod_k (z - beta_k), stored canonically: sorted by value with
 * equal values merged into a single entry. Two multisets holding the same
 * poles compare equal regardless of insertion order.
 */
class NodeMultiset {
public:
    NodeMultiset() = default;
    explicit NodeMultiset(std::vector<Node> nodes);

    static NodeMultiset from_values(std::span<const double> values);

    /// Adds `multiplicity` copies of `value`, merging with an existing node.
    void add(double value, int multiplicity = 1);

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    int total_count() const noexcept { return total_; }
    std::size_t distinct_count() const noexcept { return nodes_.size(); }

    /// Every pole, each repeated per multiplicity, in ascending order.
    std::vector<double> expanded() const;

    /// Smallest gap between distinct values (infinity with fewer than two).
    double min_separation() const noexcept;

    /// Copy with every value shifted by `c`.
    NodeMultiset shifted(double c) const;

    bool operator==(const NodeMultiset&) const = default;
    auto operator<=>(const NodeMultiset&) const = default;

private:
    std::vector<Node> nodes_;
    int total_ = 0;
};

/// Distinct poles closer than this make the simple-pole formula unreliable.
inline constexpr double kCloseNodeThreshold = 1e-6;

struct InverseValue {
    double value = 0.0;
    /// Set when distinct nodes are closer than kCloseNodeThreshold.
    bool precision_warning = false;
};

/**
 * Inverse Laplace transform of 1 / prod_k (z - beta_k) at s >= 0.
 *
 * Evaluated as the confluent divided difference of beta -> exp(beta s) over
 * the node multiset, read off the top-right entry of exp(s J) where J is
 * upper bidiagonal with the expanded nodes on the diagonal and ones above it.
 * Requires at least two nodes in total.
 */
InverseValue invert_at(const NodeMultiset& poles, double s);

/// Same transform through the partial-fraction (residue) expansion with
/// derivative terms for repeated poles. Independent of invert_at().
/// Switches to multiprecision when the terms cancel beyond what double holds.
double invert_at_residues(const NodeMultiset& poles, double s);

/// Estimated decimal digits the residue expansion loses to cancellation at s.
double residue_digits_lost(const NodeMultiset& poles, double s);

template <unsigned Digits>
using WideReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<Digits>,
                                               boost::multiprecision::et_off>;

/// Residue expansion carried out with `Digits` significant digits, for callers
/// that combine many values with alternating signs. Instantiated for 60, 150
/// and 400 digits.
template <unsigned Digits>
WideReal<Digits> invert_at_residues_wide(const NodeMultiset& poles, double s);

extern template WideReal<60> invert_at_residues_wide<60>(const NodeMultiset&, double);
extern template WideReal<150> invert_at_residues_wide<150>(const NodeMultiset&, double);
extern template WideReal<400> invert_at_residues_wide<400>(const NodeMultiset&, double);

/// Closed form sum_k exp(beta_k s) / prod_{n != k} (beta_k - beta_n) for
/// pairwise distinct poles. Throws std::invalid_argument on coincident poles.
double invert_simple_poles(std::span<const double> poles, double s);

}  // namespace mcrelay
