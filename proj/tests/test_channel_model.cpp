#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mcrelay/channel_model.hpp"
#include "mcrelay/checks/oracles.hpp"

using namespace mcrelay;

TEST(GainDistribution, PdfValues) {
    EXPECT_DOUBLE_EQ(gain_pdf(0.0, {1.0}), 1.0);
    EXPECT_NEAR(gain_pdf(1.0, {1.0}), 0.36788, 1e-5);
    EXPECT_NEAR(gain_pdf(2.0, {2.0}), 0.18394, 1e-5);
}

TEST(GainDistribution, CdfValues) {
    EXPECT_DOUBLE_EQ(gain_cdf(0.0, {1.0}), 0.0);
    EXPECT_DOUBLE_EQ(gain_cdf(1e9, {1.0}), 1.0);
    EXPECT_NEAR(gain_cdf(1.0, {1.0}), 0.63212, 1e-5);
}

TEST(GainDistribution, DomainErrors) {
    EXPECT_THROW(gain_pdf(-0.1, {1.0}), std::domain_error);
    EXPECT_THROW(gain_cdf(-0.1, {1.0}), std::domain_error);
    EXPECT_THROW(gain_pdf(1.0, {0.0}), std::invalid_argument);
    EXPECT_THROW(gain_cdf(1.0, {-2.0}), std::invalid_argument);
}

TEST(GainDistribution, PdfIntegratesToOne) {
    for (double mu : {0.3, 1.0, 4.0}) {
        const double mass = oracle::integrate_to_infinity([mu](double x) { return gain_pdf(x, {mu}); }, 0.0);
        EXPECT_NEAR(mass, 1.0, 1e-9) << "mu=" << mu;
    }
}

TEST(GainDistribution, CdfIsAntiderivativeOfPdf) {
    const HopGainParams p{1.7};
    double previous = 0.0;
    for (double x = 0.01; x < 12.0; x += 0.1) {
        const double h = 1e-5;
        const double deriv = (gain_cdf(x + h, p) - gain_cdf(x - h, p)) / (2 * h);
        EXPECT_NEAR(deriv, gain_pdf(x, p), 1e-6);
        EXPECT_GE(gain_cdf(x, p), previous);
        previous = gain_cdf(x, p);
    }
}

TEST(GainSampling, Deterministic) {
    TrialStream a(42, 7), b(42, 7), c(42, 8);
    const double first = sample_gain({1.0}, a);
    EXPECT_EQ(first, sample_gain({1.0}, b));
    EXPECT_NE(first, sample_gain({1.0}, c));
}

TEST(GainSampling, MeanMatches) {
    TrialStream rng(1, 0);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_gain({2.0}, rng);
    EXPECT_NEAR(sum / n, 2.0, 0.01);
}

TEST(GainSampling, KolmogorovSmirnov) {
    TrialStream rng(2, 0);
    std::vector<double> sample(100'000);
    for (auto& v : sample) v = sample_gain({1.0}, rng);
    EXPECT_LT(oracle::ks_distance(sample, [](double x) { return gain_cdf(x, {1.0}); }), 0.01);
}

TEST(GainSampling, MinOfTwoExponentialsIsExponential) {
    // gb * min(X1, X2) has mean gb / (1/mu1 + 1/mu2)
    const SnrParams p{10.0, 1.0, 3.0};
    TrialStream rng(3, 0);
    const int n = 1'000'000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const LinkRealization link{sample_gain({p.mu1}, rng), sample_gain({p.mu2}, rng)};
        const double g = end_to_end_snr(ProtocolKind::DF, link, p);
        m1 += g;
        m2 += g * g;
    }
    const double mean = p.gamma_bar / (1.0 / p.mu1 + 1.0 / p.mu2);
    EXPECT_NEAR(m1 / n, mean, 0.01 * mean);
    EXPECT_NEAR(m2 / n, 2 * mean * mean, 0.01 * 2 * mean * mean);
}

TEST(EndToEndSnr, Examples) {
    const SnrParams p{10.0, 1.0, 1.0};
    EXPECT_EQ(end_to_end_snr(ProtocolKind::DF, {0.0, 5.0}, p), 0.0);
    EXPECT_DOUBLE_EQ(end_to_end_snr(ProtocolKind::DF, {1.0, 2.0}, p), 10.0);
    EXPECT_NEAR(end_to_end_snr(ProtocolKind::VG, {1.0, 1.0}, p), 100.0 / 21.0, 1e-12);
    // FG: 100 * 1 * 1 / (10 * mu1 + 10 + 1)
    EXPECT_NEAR(end_to_end_snr(ProtocolKind::FG, {1.0, 1.0}, p), 100.0 / 21.0, 1e-12);
    EXPECT_NEAR(end_to_end_snr(ProtocolKind::FG, {1.0, 1.0}, {10.0, 2.0, 1.0}), 100.0 / 31.0, 1e-12);
}

TEST(EndToEndSnr, BoundsAndMonotonicity) {
    TrialStream rng(4, 0);
    for (int i = 0; i < 20'000; ++i) {
        const SnrParams p{std::pow(10.0, 4.0 * rng.uniform_open()), 0.5 + rng.uniform_open(), 0.5 + rng.uniform_open()};
        const LinkRealization link{sample_gain({p.mu1}, rng), sample_gain({p.mu2}, rng)};
        const double df = end_to_end_snr(ProtocolKind::DF, link, p);
        EXPECT_LE(end_to_end_snr(ProtocolKind::VG, link, p), df);
        for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG}) {
            const double base = end_to_end_snr(kind, link, p);
            EXPECT_GE(base, 0.0);
            EXPECT_GE(end_to_end_snr(kind, {link.h1_sq * 1.5, link.h2_sq}, p), base);
            EXPECT_GE(end_to_end_snr(kind, {link.h1_sq, link.h2_sq * 1.5}, p), base);
        }
    }
}

TEST(ProtocolKind, ParseRoundTrip) {
    for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG})
        EXPECT_EQ(parse_protocol(to_string(kind)), kind);
    EXPECT_EQ(parse_protocol("vg"), ProtocolKind::VG);
    EXPECT_THROW(parse_protocol("AF"), std::invalid_argument);
}

TEST(TrialStream, UniformOpenNeverHitsEndpoints) {
    TrialStream rng(5, 0);
    for (int i = 0; i < 100'000; ++i) {
        const double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}
