#include "mcrelay/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace mcrelay {

void SimConfig::validate() const {
    if (M < 1) throw std::invalid_argument("relay count M must be at least 1");
    if (K < 1) throw std::invalid_argument("subcarrier count K must be at least 1");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(s_threshold > 0.0)) throw std::invalid_argument("s_threshold must be positive");
    snr_params.validate();
}

namespace {

constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%

unsigned resolve_threads(unsigned requested, std::uint64_t trials) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::uint64_t>(n, trials));
}

// Splits [0, trials) into contiguous blocks, one per worker, and sums the
// per-block results. Integer addition keeps the total independent of the split.
template <class Result, class Work>
Result parallel_reduce(std::uint64_t trials, unsigned threads, Result init, Work work) {
    threads = resolve_threads(threads, trials);
    std::vector<Result> partial(threads, init);
    std::vector<std::thread> pool;
    const std::uint64_t block = trials / threads;
    const std::uint64_t extra = trials % threads;
    std::uint64_t begin = 0;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t end = begin + block + (t < extra ? 1 : 0);
        if (threads == 1) {
            work(begin, end, partial[t]);
        } else {
            pool.emplace_back([&, t, begin, end] { work(begin, end, partial[t]); });
        }
        begin = end;
    }
    for (auto& th : pool) th.join();
    Result total = init;
    for (const auto& p : partial) total += p;
    return total;
}

struct CountVector {
    std::vector<std::uint64_t> v;
    CountVector& operator+=(const CountVector& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
};

void draw_links(std::uint64_t seed, std::uint64_t trial, int M, int K, double mu1, double mu2,
                std::vector<LinkRealization>& links) {
    TrialStream rng(seed, trial);
    links.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(K));
    for (auto& link : links) {
        link.h1_sq = sample_gain({mu1}, rng);
        link.h2_sq = sample_gain({mu2}, rng);
    }
}

}  // namespace

TrialInfo run_trial(const SimConfig& cfg, std::uint64_t trial_index) {
    std::vector<LinkRealization> links;
    draw_links(cfg.master_seed, trial_index, cfg.M, cfg.K, cfg.snr_params.mu1, cfg.snr_params.mu2, links);

    TrialInfo info;
    info.bulk_info = -1.0;
    std::vector<double> best(static_cast<std::size_t>(cfg.K), -1.0);
    std::vector<int> best_relay(static_cast<std::size_t>(cfg.K), 0);
    for (int m = 0; m < cfg.M; ++m) {
        double sum = 0.0;
        for (int k = 0; k < cfg.K; ++k) {
            const double g = end_to_end_snr(cfg.protocol, links[static_cast<std::size_t>(m * cfg.K + k)], cfg.snr_params);
            sum += std::log1p(g);
            if (g > best[static_cast<std::size_t>(k)]) {
                best[static_cast<std::size_t>(k)] = g;
                best_relay[static_cast<std::size_t>(k)] = m;
            }
        }
        info.bulk_info = std::max(info.bulk_info, sum);
    }
    for (double g : best) info.ps_info += std::log1p(g);

    std::sort(best_relay.begin(), best_relay.end());
    info.relays_used = static_cast<int>(std::unique(best_relay.begin(), best_relay.end()) - best_relay.begin());
    return info;
}

OutageEstimate wilson_estimate(std::uint64_t outage_count, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("wilson_estimate: trials must be positive");
    if (outage_count > trials) throw std::invalid_argument("wilson_estimate: more outages than trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(outage_count) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

    OutageEstimate e;
    e.p_hat = p;
    e.trials = trials;
    e.outage_count = outage_count;
    e.ci_low = std::clamp(center - half, 0.0, p);
    e.ci_high = std::clamp(center + half, p, 1.0);
    e.low_count = outage_count < 10;
    return e;
}

OutageEstimate estimate_outage(const SimConfig& cfg) {
    cfg.validate();
    const bool bulk = cfg.scheme == SelectionScheme::Bulk;
    const std::uint64_t count = parallel_reduce(
        cfg.trials, cfg.threads, std::uint64_t{0},
        [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& acc) {
            for (std::uint64_t t = begin; t < end; ++t) {
                const TrialInfo info = run_trial(cfg, t);
                if ((bulk ? info.bulk_info : info.ps_info) < cfg.s_threshold) ++acc;
            }
        });
    return wilson_estimate(count, cfg.trials);
}

SweepCounts count_outages(const SweepRequest& r) {
    if (r.M < 1 || r.K < 1) throw std::invalid_argument("count_outages: M and K must be at least 1");
    if (r.trials < 1) throw std::invalid_argument("count_outages: trials must be at least 1");
    if (r.gamma_bars.empty()) throw std::invalid_argument("count_outages: empty SNR grid");
    if (!(r.s_threshold > 0.0)) throw std::invalid_argument("count_outages: s_threshold must be positive");

    const std::size_t points = r.gamma_bars.size();
    const std::size_t slots = 3 * 2 * points;
    const auto index = [points](std::size_t protocol, std::size_t scheme, std::size_t point) {
        return (protocol * 2 + scheme) * points + point;
    };

    const CountVector total = parallel_reduce(
        r.trials, r.threads, CountVector{std::vector<std::uint64_t>(slots, 0)},
        [&](std::uint64_t begin, std::uint64_t end, CountVector& acc) {
            const std::size_t mk = static_cast<std::size_t>(r.M) * static_cast<std::size_t>(r.K);
            std::vector<LinkRealization> links;
            std::vector<double> snr(mk);
            std::vector<double> best(static_cast<std::size_t>(r.K));
            for (std::uint64_t t = begin; t < end; ++t) {
                draw_links(r.master_seed, t, r.M, r.K, r.mu1, r.mu2, links);
                for (std::size_t point = 0; point < points; ++point) {
                    const SnrParams params{r.gamma_bars[point], r.mu1, r.mu2};
                    for (std::size_t protocol = 0; protocol < 3; ++protocol) {
                        if (!r.protocols[protocol]) continue;
                        const auto kind = static_cast<ProtocolKind>(protocol);
                        double bulk_info = -1.0;
                        std::fill(best.begin(), best.end(), -1.0);
                        for (int m = 0; m < r.M; ++m) {
                            double sum = 0.0;
                            for (int k = 0; k < r.K; ++k) {
                                const double g = end_to_end_snr(kind, links[static_cast<std::size_t>(m * r.K + k)], params);
                                sum += std::log1p(g);
                                best[static_cast<std::size_t>(k)] = std::max(best[static_cast<std::size_t>(k)], g);
                            }
                            bulk_info = std::max(bulk_info, sum);
                        }
                        double ps_info = 0.0;
                        for (double g : best) ps_info += std::log1p(g);
                        if (bulk_info < r.s_threshold) ++acc.v[index(protocol, 0, point)];
                        if (ps_info < r.s_threshold) ++acc.v[index(protocol, 1, point)];
                    }
                }
            }
        });

    SweepCounts out;
    out.trials = r.trials;
    for (std::size_t protocol = 0; protocol < 3; ++protocol)
        for (std::size_t scheme = 0; scheme < 2; ++scheme) {
            auto& dst = out.outages[protocol][scheme];
            dst.resize(points);
            for (std::size_t point = 0; point < points; ++point) dst[point] = total.v[index(protocol, scheme, point)];
        }
    return out;
}

OutageCurve estimate_curve(const SimConfig& cfg, std::span<const double> snr_grid_db) {
    cfg.validate();
    if (snr_grid_db.empty()) throw std::invalid_argument("estimate_curve: empty SNR grid");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (!(snr_grid_db[i] > snr_grid_db[i - 1]))
            throw std::invalid_argument("estimate_curve: SNR grid must be strictly increasing");

    SweepRequest request;
    request.M = cfg.M;
    request.K = cfg.K;
    request.mu1 = cfg.snr_params.mu1;
    request.mu2 = cfg.snr_params.mu2;
    request.s_threshold = cfg.s_threshold;
    request.trials = cfg.trials;
    request.master_seed = cfg.master_seed;
    request.threads = cfg.threads;
    for (double db : snr_grid_db) request.gamma_bars.push_back(db_to_linear(db));
    request.protocols = {false, false, false};
    request.protocols[static_cast<std::size_t>(cfg.protocol)] = true;
    const SweepCounts counts = count_outages(request);
    const auto& hits = counts.at(cfg.protocol, cfg.scheme);

    OutageCurve curve;
    curve.reserve(snr_grid_db.size());
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        CurvePoint point;
        point.snr_db = snr_grid_db[i];
        const ProtocolDistribution d{cfg.protocol, {request.gamma_bars[i], cfg.snr_params.mu1, cfg.snr_params.mu2}};
        const OutageResult analytic = outage(cfg.scheme, cfg.M, cfg.K, d, cfg.s_threshold);
        point.analytic = analytic.approx;
        point.asymptotic = analytic.asymptotic;
        point.clamped = analytic.clamped;
        point.mc = wilson_estimate(hits[i], cfg.trials);
        curve.push_back(point);
    }
    return curve;
}

}  // namespace mcrelay
