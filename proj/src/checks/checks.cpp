#include "mcrelay/checks/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mcrelay/channel_model.hpp"
#include "mcrelay/checks/oracles.hpp"
#include "mcrelay/cli_runner.hpp"
#include "mcrelay/laplace_inversion.hpp"
#include "mcrelay/monte_carlo.hpp"
#include "mcrelay/outage_analytics.hpp"
#include "mcrelay/snr_distributions.hpp"
#include "mcrelay/sx_coefficients.hpp"

namespace mcrelay::checks {

namespace {

// Collects failures; a check passes when nothing was recorded.
struct Findings {
    std::vector<std::string> failures;
    std::size_t evaluated = 0;

    void expect(bool ok, const std::string& what) {
        ++evaluated;
        if (!ok && failures.size() < 20) failures.push_back(what);
        else if (!ok) failures.emplace_back();
    }
};

template <class Body>
CheckResult timed(std::string name, Body body) {
    CheckResult r;
    r.name = std::move(name);
    const auto start = std::chrono::steady_clock::now();
    try {
        Findings f;
        std::string summary = body(f);
        r.passed = f.failures.empty();
        if (r.passed) {
            r.detail = fmt::format("{} comparisons; {}", f.evaluated, summary);
        } else {
            r.detail = fmt::format("{} of {} comparisons failed; {}", f.failures.size(), f.evaluated, summary);
            for (const auto& msg : f.failures)
                if (!msg.empty()) r.detail += "\n  " + msg;
        }
    } catch (const std::exception& ex) {
        r.passed = false;
        r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double rel_err(double value, double reference) {
    return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

double half_width(const OutageEstimate& e) { return 0.5 * (e.ci_high - e.ci_low); }

constexpr double kPaperThreshold = 2.0;  // s = 2 (xi = 1 nat), mu1 = mu2 = 1

}  // namespace

SxFunction library_sx() {
    return [](int K, double s, int q, int x) { return sx({K, s, q, x}).value; };
}

CheckResult exact_oracle_agreement(std::uint64_t trials) {
    return timed("C1 exact DF oracle (K=1) vs Monte Carlo", [&](Findings& f) {
        const std::vector<double> snr_db{20.0, 30.0};
        for (int M = 1; M <= 3; ++M) {
            SweepRequest req;
            req.M = M;
            req.K = 1;
            req.s_threshold = kPaperThreshold;
            req.trials = trials;
            req.master_seed = 0xC1 + static_cast<std::uint64_t>(M);
            for (double db : snr_db) req.gamma_bars.push_back(db_to_linear(db));
            const SweepCounts counts = count_outages(req);
            for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
                const auto& hits = counts.at(ProtocolKind::DF, scheme);
                for (std::size_t i = 0; i < snr_db.size(); ++i) {
                    const double exact = oracle::df_outage_single_carrier(M, {req.gamma_bars[i], 1.0, 1.0}, kPaperThreshold);
                    const OutageEstimate e = wilson_estimate(hits[i], trials);
                    f.expect(std::abs(e.p_hat - exact) <= 3.0 * half_width(e),
                             fmt::format("M={} {} {} dB: p_hat={:.6g} exact={:.6g} half-width={:.3g}", M,
                                         to_string(scheme), snr_db[i], e.p_hat, exact, half_width(e)));
                }
            }
        }
        return fmt::format("{} trials per configuration, tolerance 3 Wilson half-widths", trials);
    });
}

CheckResult approximation_accuracy(std::uint64_t trials) {
    return timed("C2 approximation vs 1e7-trial Monte Carlo", [&](Findings& f) {
        struct Shape { int M, K; };
        const std::vector<Shape> shapes{{1, 2}, {2, 1}, {2, 2}};
        std::vector<double> grid;
        for (double db = 0.0; db <= 50.0 + 1e-9; db += 2.0) grid.push_back(db);

        double worst[3] = {0.0, 0.0, 0.0};
        std::size_t in_band = 0;
        for (const auto& shape : shapes) {
            // Pilot run picks the grid points that can fall in the band.
            SweepRequest pilot;
            pilot.M = shape.M;
            pilot.K = shape.K;
            pilot.s_threshold = kPaperThreshold;
            pilot.trials = std::min<std::uint64_t>(trials, 100'000);
            pilot.master_seed = 0xA11CE;
            for (double db : grid) pilot.gamma_bars.push_back(db_to_linear(db));
            const SweepCounts pilot_counts = count_outages(pilot);

            std::vector<double> selected;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                bool keep = false;
                for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG})
                    for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
                        const double p = static_cast<double>(pilot_counts.at(kind, scheme)[i]) / static_cast<double>(pilot.trials);
                        keep = keep || (p >= 1e-5 && p <= 1e-1);
                    }
                if (keep) selected.push_back(grid[i]);
            }
            if (selected.empty()) continue;

            SweepRequest req = pilot;
            req.trials = trials;
            req.master_seed = 0xC2 + static_cast<std::uint64_t>(shape.M * 10 + shape.K);
            req.gamma_bars.clear();
            for (double db : selected) req.gamma_bars.push_back(db_to_linear(db));
            const SweepCounts counts = count_outages(req);

            for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG}) {
                const double tol = kind == ProtocolKind::FG ? 0.35 : 0.20;
                for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
                    const auto& hits = counts.at(kind, scheme);
                    for (std::size_t i = 0; i < selected.size(); ++i) {
                        const double p_hat = static_cast<double>(hits[i]) / static_cast<double>(trials);
                        if (p_hat < 1e-4 || p_hat > 1e-2) continue;
                        ++in_band;
                        const ProtocolDistribution d{kind, {req.gamma_bars[i], 1.0, 1.0}};
                        const double approx = outage(scheme, shape.M, shape.K, d, kPaperThreshold).approx;
                        const double err = rel_err(approx, p_hat);
                        worst[static_cast<int>(kind)] = std::max(worst[static_cast<int>(kind)], err);
                        f.expect(err <= tol, fmt::format("{} {} M={} K={} {} dB: approx={:.5g} mc={:.5g} rel.err={:.3f} > {}",
                                                         to_string(kind), to_string(scheme), shape.M, shape.K,
                                                         selected[i], approx, p_hat, err, tol));
                    }
                }
            }
        }
        if (in_band == 0) f.expect(false, "no grid point fell in the [1e-4, 1e-2] band");
        return fmt::format("{} in-band points; worst relative error DF={:.3f} FG={:.3f} VG={:.3f}", in_band, worst[0],
                           worst[1], worst[2]);
    });
}

CheckResult diversity_slopes() {
    return timed("C3 high-SNR diversity slopes (DF, 40-50 dB)", [](Findings& f) {
        struct Shape { int M, K; };
        double worst = 0.0;
        for (const Shape shape : {Shape{1, 1}, Shape{2, 1}, Shape{1, 2}, Shape{2, 2}}) {
            for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
                OutageCurve curve;
                for (double db = 40.0; db <= 50.0 + 1e-9; db += 1.0) {
                    const ProtocolDistribution d{ProtocolKind::DF, {db_to_linear(db), 1.0, 1.0}};
                    CurvePoint p;
                    p.snr_db = db;
                    p.analytic = outage(scheme, shape.M, shape.K, d, kPaperThreshold).approx;
                    p.mc.low_count = true;
                    curve.push_back(p);
                }
                const double expected = -diversity_order(scheme, shape.M, shape.K, 0) / 10.0;
                const auto slope = fit_high_snr_slope(curve, 10.0).analytic;
                const double err = slope ? rel_err(*slope, expected) : 1.0;
                worst = std::max(worst, err);
                f.expect(err <= 0.05, fmt::format("{} M={} K={}: slope={} expected={}", to_string(scheme), shape.M,
                                                  shape.K, slope ? *slope : NAN, expected));
            }
        }
        return fmt::format("worst relative slope error {:.2e} (tolerance 5%)", worst);
    });
}

CheckResult laplace_engine() {
    return timed("C4 inverse Laplace dual-path agreement", [](Findings& f) {
        TrialStream rng(0x1A91ACE, 0);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const int q = static_cast<int>(rng() % 5);
            const double span = q + 2.0;
            // At most 4 distinct values, at least 0.5 apart; capped so the
            // rejection loop always has room.
            const int distinct = std::min(1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(span));
            std::vector<double> values;
            while (static_cast<int>(values.size()) < distinct) {
                const double v = span * rng.uniform_open();
                bool far = true;
                for (double w : values) far = far && std::abs(v - w) >= 0.5;
                if (far) values.push_back(v);
            }
            NodeMultiset nodes;
            for (double v : values) nodes.add(v, 1 + static_cast<int>(rng() % 6));
            if (nodes.total_count() < 2) nodes.add(values.front());
            const double s = 10.0 * rng.uniform_open();

            const double a = invert_at(nodes, s).value;
            const double b = invert_at_residues(nodes, s);
            const double err = rel_err(a, b);
            worst = std::max(worst, err);
            f.expect(err <= 1e-8, fmt::format("nodes={} total={} s={:.4f}: divided-difference={:.17g} residues={:.17g}",
                                              nodes.distinct_count(), nodes.total_count(), s, a, b));
        }
        for (double s : {0.5, 2.0, 5.0}) {
            const double e = std::exp(s);
            const double v1 = invert_at(NodeMultiset({{0.0, 1}, {1.0, 1}}), s).value;
            const double v2 = invert_at(NodeMultiset({{0.0, 1}, {1.0, 2}}), s).value;
            const double v3 = invert_at(NodeMultiset({{0.0, 2}}), s).value;
            f.expect(rel_err(v1, e - 1.0) <= 1e-10, fmt::format("{{0,1}} at s={}: {}", s, v1));
            f.expect(rel_err(v2, 1.0 - e + s * e) <= 1e-10, fmt::format("{{0,1x2}} at s={}: {}", s, v2));
            f.expect(rel_err(v3, s) <= 1e-10, fmt::format("{{0x2}} at s={}: {}", s, v3));
        }
        return fmt::format("worst dual-path relative difference {:.2e} (tolerance 1e-8)", worst);
    });
}

CheckResult sx_oracle(const SxFunction& sx_fn) {
    return timed("C5 S_x against symbolic enumeration", [&](Findings& f) {
        double worst = 0.0;
        for (int K = 1; K <= 3; ++K)
            for (int q = 0; q <= 1; ++q)
                for (int x = 0; x <= 1; ++x)
                    for (double s : {0.5, 1.0, 2.0, 4.0}) {
                        const double got = sx_fn(K, s, q, x);
                        const double want = static_cast<double>(oracle::sx_enumerated(K, s, q, x));
                        const double err = rel_err(got, want);
                        worst = std::max(worst, err);
                        f.expect(err <= 1e-8, fmt::format("S_{}(K={}, s={}, q={}) = {:.15g}, enumeration {:.15g}", x, K,
                                                          s, q, got, want));
                    }
        const double e2 = std::exp(2.0);
        const double s0 = sx_fn(1, 2.0, 0, 0);
        const double s1 = sx_fn(1, 2.0, 0, 1);
        f.expect(rel_err(s0, e2 - 1.0) <= 1e-10, fmt::format("S_0(1,2,0) = {:.15g}", s0));
        f.expect(rel_err(s1, (e2 * e2 - 1.0) / 2.0) <= 1e-10, fmt::format("S_1(1,2,0) = {:.15g}", s1));
        return fmt::format("worst relative difference {:.2e} (tolerance 1e-8)", worst);
    });
}

CheckResult structural_properties(std::uint64_t trials) {
    return timed("C6 structural identities and determinism", [&](Findings& f) {
        for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG})
            for (double gb : {10.0, 100.0, 1000.0})
                for (int K = 1; K <= 3; ++K) {
                    const ProtocolDistribution d{kind, {gb, 1.0, 1.0}};
                    const double fi = f_i_approx(K, d, 0, kPaperThreshold).value;
                    for (int M = 1; M <= 3; ++M) {
                        const double bulk = bulk_outage(M, K, d, 0, kPaperThreshold).approx;
                        f.expect(bulk == std::pow(fi, M),
                                 fmt::format("bulk != F_I^M for {} M={} K={} gb={}", to_string(kind), M, K, gb));
                    }
                    const double b1 = bulk_outage(1, K, d, 0, kPaperThreshold).approx;
                    const double p1 = ps_outage(1, K, d, 0, kPaperThreshold).approx;
                    f.expect(b1 == p1, fmt::format("M=1 schemes differ for {} K={} gb={}", to_string(kind), K, gb));
                }

        std::uint64_t violations = 0;
        const ProtocolKind kinds[] = {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG};
        for (std::uint64_t t = 0; t < trials; ++t) {
            SimConfig cfg;
            cfg.M = 3;
            cfg.K = 3;
            cfg.protocol = kinds[t % 3];
            cfg.snr_params = {10.0, 1.0, 1.0};
            cfg.master_seed = 0xC6;
            const TrialInfo info = run_trial(cfg, t);
            if (info.ps_info < info.bulk_info) ++violations;
        }
        f.expect(violations == 0, fmt::format("{} trials with ps_info < bulk_info", violations));

        for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
            SimConfig cfg;
            cfg.M = 2;
            cfg.K = 2;
            cfg.scheme = scheme;
            cfg.trials = 200'000;
            cfg.master_seed = 0xD5;
            const std::vector<double> grid{10.0, 15.0, 20.0, 25.0, 30.0};
            std::string reference;
            for (unsigned threads : {1u, 4u, 8u}) {
                cfg.threads = threads;
                const std::string csv = format_csv(estimate_curve(cfg, grid));
                if (reference.empty()) reference = csv;
                f.expect(csv == reference, fmt::format("{} output with {} threads differs from 1 thread",
                                                       to_string(scheme), threads));
            }
        }
        return fmt::format("{} dominance trials, zero-tolerance comparisons", trials);
    });
}

CheckResult protocol_ordering(std::uint64_t links) {
    return timed("C7 per-link protocol ordering VG <= DF", [&](Findings& f) {
        TrialStream rng(0xC7, 0);
        std::uint64_t violations = 0;
        for (std::uint64_t i = 0; i < links; ++i) {
            const double gb = std::pow(10.0, 5.0 * rng.uniform_open());
            const SnrParams p{gb, 1.0, 1.0};
            const LinkRealization link{sample_gain({1.0}, rng), sample_gain({1.0}, rng)};
            if (end_to_end_snr(ProtocolKind::VG, link, p) > end_to_end_snr(ProtocolKind::DF, link, p)) ++violations;
        }
        f.expect(violations == 0, fmt::format("{} links with gamma_VG > gamma_DF", violations));

        SweepRequest req;
        req.M = 2;
        req.K = 2;
        req.trials = 200'000;
        req.master_seed = 0xC7;
        for (double db = 0.0; db <= 40.0; db += 5.0) req.gamma_bars.push_back(db_to_linear(db));
        const SweepCounts counts = count_outages(req);
        for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier})
            for (std::size_t i = 0; i < req.gamma_bars.size(); ++i)
                f.expect(counts.at(ProtocolKind::VG, scheme)[i] >= counts.at(ProtocolKind::DF, scheme)[i],
                         fmt::format("{} point {}: VG outages < DF outages", to_string(scheme), i));
        return fmt::format("{} links sampled", links);
    });
}

std::vector<CheckResult> module_invariants() {
    std::vector<CheckResult> out;

    out.push_back(timed("channel: gain pdf normalization and cdf derivative", [](Findings& f) {
        for (double mu : {0.5, 1.0, 2.0}) {
            const double mass = oracle::integrate_to_infinity([mu](double x) { return gain_pdf(x, {mu}); }, 0.0);
            f.expect(std::abs(mass - 1.0) < 1e-9, fmt::format("mu={}: mass {}", mu, mass));
            for (double x = 0.05; x < 10.0; x += 0.25) {
                const double h = 1e-5;
                const double deriv = (gain_cdf(x + h, {mu}) - gain_cdf(x - h, {mu})) / (2 * h);
                f.expect(std::abs(deriv - gain_pdf(x, {mu})) < 1e-6, fmt::format("mu={} x={}: cdf' mismatch", mu, x));
            }
        }
        return std::string("mu in {0.5, 1, 2}");
    }));

    out.push_back(timed("snr: densities normalize; quadrature cdf matches closed form", [](Findings& f) {
        for (auto kind : {ProtocolKind::DF, ProtocolKind::FG, ProtocolKind::VG})
            for (double gb : {10.0, 100.0})
                for (auto [mu1, mu2] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
                    const ProtocolDistribution d{kind, {gb, mu1, mu2}};
                    const double mass = oracle::integrate([&](double t) { return t > 0 ? pdf(d, t) : 0.0; }, 0.0, 1.0) +
                                        oracle::integrate_to_infinity([&](double t) { return pdf(d, t); }, 1.0);
                    f.expect(std::abs(mass - 1.0) < 1e-6, fmt::format("{} gb={}: mass {}", to_string(kind), gb, mass));
                    for (double s : {0.01, 0.5, 3.0, 40.0, 500.0}) {
                        double ref = -std::expm1(-df_rate(d.params) * s);
                        if (kind == ProtocolKind::FG) ref = oracle::fg_cdf_closed_form(d.params, s);
                        if (kind == ProtocolKind::VG) ref = oracle::vg_cdf_closed_form(d.params, s);
                        f.expect(std::abs(cdf(d, s) - ref) < 1e-8,
                                 fmt::format("{} gb={} s={}: cdf {} vs {}", to_string(kind), gb, s, cdf(d, s), ref));
                    }
                }
        return std::string("DF/FG/VG at gamma_bar 10, 100");
    }));

    out.push_back(timed("laplace: shift, permutation, confluence and s=0", [](Findings& f) {
        const NodeMultiset base({{0.0, 1}, {1.0, 2}, {2.5, 1}});
        for (double s : {0.3, 1.0, 4.0}) {
            for (double c : {-1.5, 0.7, 2.0}) {
                const double lhs = invert_at(base.shifted(c), s).value;
                const double rhs = std::exp(c * s) * invert_at(base, s).value;
                f.expect(rel_err(lhs, rhs) < 1e-9, fmt::format("shift c={} s={}", c, s));
            }
            const std::vector<double> forward{0.0, 1.0, 1.0, 2.5};
            const std::vector<double> backward{2.5, 1.0, 0.0, 1.0};
            f.expect(invert_at(NodeMultiset::from_values(forward), s).value ==
                         invert_at(NodeMultiset::from_values(backward), s).value,
                     "permutation changed the value");
            // Splitting a double node by +-eps moves the value by O(eps^2).
            const double eps = 1e-6;
            const double split = invert_at(NodeMultiset({{0.0, 1}, {1.0 - eps, 1}, {1.0 + eps, 1}}), s).value;
            const double merged = invert_at(NodeMultiset({{0.0, 1}, {1.0, 2}}), s).value;
            f.expect(rel_err(split, merged) < 1e-9, fmt::format("confluence at s={}", s));
        }
        f.expect(invert_at(base, 0.0).value == 0.0, "s = 0 must give 0");
        return std::string("three node sets");
    }));

    out.push_back(timed("S_x: positivity and S_1 > S_0 for q = 0", [](Findings& f) {
        for (int K = 1; K <= 8; ++K)
            for (double s : {0.5, 1.0, 2.0, 4.0}) {
                const double s0 = sx({K, s, 0, 0}).value;
                const double s1 = sx({K, s, 0, 1}).value;
                f.expect(s0 > 0.0 && s1 > 0.0, fmt::format("K={} s={}: non-positive S_x", K, s));
                f.expect(s1 - s0 > 0.0, fmt::format("K={} s={}: S_1 - S_0 = {}", K, s, s1 - s0));
            }
        return std::string("K <= 8");
    }));

    out.push_back(timed("analytics: asymptote slope and convergence (DF)", [](Findings& f) {
        for (int M = 1; M <= 3; ++M)
            for (int K = 1; K <= 3; ++K)
                for (auto scheme : {SelectionScheme::Bulk, SelectionScheme::PerSubcarrier}) {
                    const auto at = [&](double gb) {
                        return outage(scheme, M, K, {ProtocolKind::DF, {gb, 1.0, 1.0}}, kPaperThreshold);
                    };
                    const OutageResult lo = at(1e4);
                    const OutageResult hi = at(1e5);
                    const double decade = std::log10(*lo.asymptotic) - std::log10(*hi.asymptotic);
                    f.expect(rel_err(decade, M * K) < 0.02, fmt::format("{} M={} K={}: {} per decade",
                                                                       to_string(scheme), M, K, decade));
                    f.expect(rel_err(hi.approx, *hi.asymptotic) < 0.2,
                             fmt::format("{} M={} K={}: approx/asymptote far apart", to_string(scheme), M, K));
                    f.expect(!at(1e3).clamped, fmt::format("{} M={} K={}: clamped at 30 dB", to_string(scheme), M, K));
                }
        return std::string("M, K <= 3");
    }));

    return out;
}

std::vector<CheckResult> run_verification(VerifyLevel level) {
    std::vector<CheckResult> out = module_invariants();
    out.push_back(laplace_engine());
    out.push_back(sx_oracle());
    out.push_back(diversity_slopes());
    out.push_back(structural_properties(level == VerifyLevel::Full ? 1'000'000 : 300'000));
    out.push_back(protocol_ordering());
    out.push_back(exact_oracle_agreement(level == VerifyLevel::Full ? 1'000'000 : 200'000));
    if (level == VerifyLevel::Full) out.push_back(approximation_accuracy());
    return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
    nlohmann::json checks = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    return {{"passed", all}, {"checks", checks}};
}

}  // namespace mcrelay::checks
