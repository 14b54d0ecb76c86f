#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mcrelay/checks/oracles.hpp"
#include "mcrelay/laplace_inversion.hpp"

using namespace mcrelay;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(NodeMultiset, CanonicalForm) {
    const std::vector<double> a{2.0, 0.0, 1.0, 1.0};
    const std::vector<double> b{1.0, 2.0, 1.0, 0.0};
    const auto ma = NodeMultiset::from_values(a);
    EXPECT_EQ(ma, NodeMultiset::from_values(b));
    EXPECT_EQ(ma.total_count(), 4);
    EXPECT_EQ(ma.distinct_count(), 3u);
    EXPECT_EQ(ma.nodes()[1], (Node{1.0, 2}));
    EXPECT_EQ(ma.expanded(), (std::vector<double>{0.0, 1.0, 1.0, 2.0}));
    EXPECT_DOUBLE_EQ(ma.min_separation(), 1.0);
    EXPECT_THROW(NodeMultiset({{1.0, 0}}), std::invalid_argument);
}

TEST(InvertAt, HandDerivedValues) {
    for (double s : {0.0, 0.5, 2.0, 7.0}) {
        EXPECT_NEAR(invert_at(NodeMultiset({{0.0, 2}}), s).value, s, 1e-10 * std::max(1.0, s));
    }
    EXPECT_NEAR(invert_at(NodeMultiset({{0.0, 1}, {1.0, 1}}), 2.0).value, std::exp(2.0) - 1.0, 1e-10 * 6.39);
    EXPECT_NEAR(invert_at(NodeMultiset({{0.0, 1}, {1.0, 2}}), 2.0).value, 1.0 + std::exp(2.0), 1e-10 * 8.39);
}

TEST(InvertAt, Preconditions) {
    EXPECT_THROW(invert_at(NodeMultiset({{0.0, 1}}), 1.0), std::invalid_argument);
    EXPECT_THROW(invert_at(NodeMultiset({{0.0, 2}}), -1.0), std::domain_error);
    EXPECT_THROW(invert_at_residues(NodeMultiset({{0.0, 1}}), 1.0), std::invalid_argument);
}

TEST(InvertAt, PrecisionWarningForCloseNodes) {
    EXPECT_TRUE(invert_at(NodeMultiset({{0.0, 1}, {1e-8, 1}}), 1.0).precision_warning);
    EXPECT_FALSE(invert_at(NodeMultiset({{0.0, 1}, {1e-3, 1}}), 1.0).precision_warning);
    // The matrix route stays accurate next to the confluent limit L^-1[1/z^2] = s.
    EXPECT_NEAR(invert_at(NodeMultiset({{0.0, 1}, {1e-8, 1}}), 1.0).value, 1.0, 1e-7);
}

TEST(InvertSimplePoles, Values) {
    const std::vector<double> p01{0.0, 1.0};
    const std::vector<double> p012{0.0, 1.0, 2.0};
    const std::vector<double> sym{-1.0, 1.0};
    EXPECT_NEAR(invert_simple_poles(p01, 2.0), std::exp(2.0) - 1.0, 1e-12);
    EXPECT_NEAR(invert_simple_poles(p012, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(invert_simple_poles(sym, 1.0), std::sinh(1.0), 1e-12);
    const std::vector<double> repeated{0.0, 1.0, 1.0};
    EXPECT_THROW(invert_simple_poles(repeated, 1.0), std::invalid_argument);
}

TEST(InvertSimplePoles, AgreesWithMatrixRouteForSeparatedNodes) {
    TrialStream rng(11, 0);
    for (int t = 0; t < 300; ++t) {
        std::vector<double> poles;
        const int n = 2 + static_cast<int>(rng() % 6);
        while (static_cast<int>(poles.size()) < n) {
            const double v = 6.0 * rng.uniform_open() - 1.0;
            bool far = true;
            for (double w : poles) far = far && std::abs(v - w) > 0.2;
            if (far) poles.push_back(v);
        }
        const double s = 8.0 * rng.uniform_open();
        EXPECT_LT(rel(invert_simple_poles(poles, s), invert_at(NodeMultiset::from_values(poles), s).value), 1e-8);
    }
}

TEST(InvertAt, AgreesWithExactRationalOracle) {
    const std::vector<std::vector<int>> cases{{0, 1}, {0, 1, 1}, {0, 1, 1, 1, 2}, {0, 2, 2, 1, 1, 3},
                                              {0, 0, 0, 4}, {0, 1, 2, 3, 4, 5}, {0, 5, 5, 5, 5, 5, 5, 1}};
    for (const auto& poles : cases) {
        std::vector<double> values(poles.begin(), poles.end());
        const auto nodes = NodeMultiset::from_values(values);
        for (double s : {0.25, 1.0, 2.0, 6.0}) {
            const double want = static_cast<double>(oracle::inverse_laplace_integer_poles(poles, s));
            EXPECT_LT(rel(invert_at(nodes, s).value, want), 1e-10);
            EXPECT_LT(rel(invert_at_residues(nodes, s), want), 1e-10);
        }
    }
}

TEST(InvertAt, ShiftProperty) {
    const NodeMultiset base({{0.0, 2}, {1.0, 1}, {3.0, 3}});
    for (double c : {-2.0, -0.5, 0.25, 1.5})
        for (double s : {0.1, 1.0, 3.0})
            EXPECT_LT(rel(invert_at(base.shifted(c), s).value, std::exp(c * s) * invert_at(base, s).value), 1e-9);
}

TEST(InvertAt, ConfluenceContinuity) {
    // The split and merged values differ by O(eps^2).
    const double eps = 1e-6;
    for (double s : {0.5, 2.0, 5.0}) {
        const double split = invert_at(NodeMultiset({{0.0, 1}, {1.0 - eps, 1}, {1.0 + eps, 1}}), s).value;
        const double merged = invert_at(NodeMultiset({{0.0, 1}, {1.0, 2}}), s).value;
        EXPECT_LT(rel(split, merged), 1e-9);
    }
}

TEST(InvertAt, VanishesAtZero) {
    EXPECT_EQ(invert_at(NodeMultiset({{0.0, 1}, {1.0, 3}, {2.0, 1}}), 0.0).value, 0.0);
    EXPECT_EQ(invert_at_residues(NodeMultiset({{0.0, 1}, {1.0, 3}}), 0.0), 0.0);
}

TEST(InvertAt, DualPathsAgreeOnRandomMultisets) {
    TrialStream rng(12, 0);
    for (int t = 0; t < 1000; ++t) {
        const int q = static_cast<int>(rng() % 5);
        const double span = q + 2.0;
        const int distinct = std::min(1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(span));
        NodeMultiset nodes;
        std::vector<double> values;
        while (static_cast<int>(values.size()) < distinct) {
            const double v = span * rng.uniform_open();
            bool far = true;
            for (double w : values) far = far && std::abs(v - w) >= 0.5;
            if (far) values.push_back(v);
        }
        for (double v : values) nodes.add(v, 1 + static_cast<int>(rng() % 6));
        if (nodes.total_count() < 2) nodes.add(values.front());
        const double s = 10.0 * rng.uniform_open();
        EXPECT_LT(rel(invert_at(nodes, s).value, invert_at_residues(nodes, s)), 1e-8) << "trial " << t;
    }
}
