#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "mcrelay/laplace_inversion.hpp"
#include "mcrelay/monte_carlo.hpp"
#include "mcrelay/outage_analytics.hpp"
#include "mcrelay/snr_distributions.hpp"
#include "mcrelay/sx_coefficients.hpp"

namespace py = pybind11;
using namespace mcrelay;

namespace {

ProtocolDistribution distribution(const std::string& protocol, double gamma_bar, double mu1, double mu2) {
    ProtocolDistribution d{parse_protocol(protocol), {gamma_bar, mu1, mu2}};
    d.params.validate();
    return d;
}

SimConfig make_config(int M, int K, const std::string& protocol, const std::string& scheme, double gamma_bar,
                      double mu1, double mu2, double xi, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    SimConfig cfg;
    cfg.M = M;
    cfg.K = K;
    cfg.protocol = parse_protocol(protocol);
    cfg.scheme = parse_scheme(scheme);
    cfg.snr_params = {gamma_bar, mu1, mu2};
    cfg.s_threshold = 2.0 * xi;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.threads = threads;
    return cfg;
}

py::dict estimate_dict(const OutageEstimate& e) {
    py::dict out;
    out["p_hat"] = e.p_hat;
    out["ci_low"] = e.ci_low;
    out["ci_high"] = e.ci_high;
    out["trials"] = e.trials;
    out["outage_count"] = e.outage_count;
    out["low_count"] = e.low_count;
    return out;
}

py::dict outage_dict(const OutageResult& r) {
    py::dict out;
    out["approx"] = r.approx;
    out["asymptotic"] = r.asymptotic;
    out["diversity"] = r.diversity;
    out["clamped"] = r.clamped;
    return out;
}

}  // namespace

PYBIND11_MODULE(_mcrelay, m) {
    m.doc() = "Outage analysis of multi-relay OFDM selection";

    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ValueError);

    m.def(
        "pdf",
        [](const std::string& protocol, double s, double gamma_bar, double mu1, double mu2) {
            return pdf(distribution(protocol, gamma_bar, mu1, mu2), s);
        },
        py::arg("protocol"), py::arg("s"), py::arg("gamma_bar"), py::arg("mu1") = 1.0, py::arg("mu2") = 1.0,
        "End-to-end SNR density.");
    m.def(
        "cdf",
        [](const std::string& protocol, double s, double gamma_bar, double mu1, double mu2) {
            return cdf(distribution(protocol, gamma_bar, mu1, mu2), s);
        },
        py::arg("protocol"), py::arg("s"), py::arg("gamma_bar"), py::arg("mu1") = 1.0, py::arg("mu2") = 1.0,
        "End-to-end SNR distribution function.");

    m.def(
        "invert_at",
        [](const std::vector<double>& poles, double s) {
            const auto r = invert_at(NodeMultiset::from_values(poles), s);
            return py::make_tuple(r.value, r.precision_warning);
        },
        py::arg("poles"), py::arg("s"),
        "Inverse Laplace transform of 1/prod(z - pole) at s. Returns (value, precision_warning).");

    m.def(
        "sx",
        [](int K, double s, int q, int x) {
            SxQuery query{K, s, q, x};
            query.validate();
            const auto r = sx(query);
            return py::make_tuple(r.value, r.precision_warning);
        },
        py::arg("K"), py::arg("s"), py::arg("q"), py::arg("x"),
        "Combinatorial coefficient S_x(K, s, q). Returns (value, precision_warning).");

    m.def(
        "outage",
        [](const std::string& scheme, int M, int K, const std::string& protocol, double gamma_bar, double mu1,
           double mu2, double xi) {
            return outage_dict(outage(parse_scheme(scheme), M, K, distribution(protocol, gamma_bar, mu1, mu2), 2.0 * xi));
        },
        py::arg("scheme"), py::arg("M"), py::arg("K"), py::arg("protocol"), py::arg("gamma_bar"), py::arg("mu1") = 1.0,
        py::arg("mu2") = 1.0, py::arg("xi") = 1.0,
        "Analytic outage approximation, asymptote and diversity order. `xi` is the rate in nats.");

    m.def("diversity_order",
          [](const std::string& scheme, int M, int K, int q) { return diversity_order(parse_scheme(scheme), M, K, q); },
          py::arg("scheme"), py::arg("M"), py::arg("K"), py::arg("q") = 0);

    m.def(
        "estimate_outage",
        [](int M, int K, const std::string& protocol, const std::string& scheme, double gamma_bar, double mu1,
           double mu2, double xi, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
            const auto cfg = make_config(M, K, protocol, scheme, gamma_bar, mu1, mu2, xi, trials, seed, threads);
            OutageEstimate e;
            {
                py::gil_scoped_release release;
                e = estimate_outage(cfg);
            }
            return estimate_dict(e);
        },
        py::arg("M"), py::arg("K"), py::arg("protocol"), py::arg("scheme"), py::arg("gamma_bar"), py::arg("mu1") = 1.0,
        py::arg("mu2") = 1.0, py::arg("xi") = 1.0, py::arg("trials") = 100000, py::arg("seed") = 0,
        py::arg("threads") = 0, "Monte Carlo outage probability with a Wilson 95% interval.");

    m.def(
        "estimate_curve",
        [](int M, int K, const std::string& protocol, const std::string& scheme, const std::vector<double>& snr_db,
           double mu1, double mu2, double xi, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
            const auto cfg = make_config(M, K, protocol, scheme, 1.0, mu1, mu2, xi, trials, seed, threads);
            OutageCurve curve;
            {
                py::gil_scoped_release release;
                curve = estimate_curve(cfg, snr_db);
            }
            py::list rows;
            for (const auto& p : curve) {
                py::dict row;
                row["snr_db"] = p.snr_db;
                row["analytic"] = p.analytic;
                row["asymptotic"] = p.asymptotic;
                row["mc_p_hat"] = p.mc.p_hat;
                row["mc_ci_low"] = p.mc.ci_low;
                row["mc_ci_high"] = p.mc.ci_high;
                row["clamped_flag"] = p.clamped;
                rows.append(row);
            }
            return rows;
        },
        py::arg("M"), py::arg("K"), py::arg("protocol"), py::arg("scheme"), py::arg("snr_db"), py::arg("mu1") = 1.0,
        py::arg("mu2") = 1.0, py::arg("xi") = 1.0, py::arg("trials") = 100000, py::arg("seed") = 0,
        py::arg("threads") = 0, "Analytic and Monte Carlo outage over an SNR grid in dB.");

    m.def(
        "wilson",
        [](std::uint64_t outage_count, std::uint64_t trials) { return estimate_dict(wilson_estimate(outage_count, trials)); },
        py::arg("outage_count"), py::arg("trials"));
}
